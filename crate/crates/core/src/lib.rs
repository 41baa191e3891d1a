// SPDX-License-Identifier: Apache-2.0

pub mod bosonic_ring;
pub mod disorder_lab;
pub mod error;
pub mod fit;
pub mod floquet_observables;
pub mod opalg;
pub mod sampling;
pub mod spin_models;
pub mod table;
pub mod time_lattice;
pub mod two_mode_dtc;

pub use error::{Error, Result};

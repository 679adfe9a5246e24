//! Simulator for a reconfigurable memristor-CMOS array multiplier.
//!
//! - [`device`]: linear ion-drift memristor model.
//! - [`gates`]: memristor-ratioed NAND/NOR gates and gate-level netlists.
//! - [`array`]: the partitionable ripple-carry array multiplier.
//! - [`cost`]: delay, energy and area estimates.
//! - [`apps`]: FIR filter and 4-point FFT datapaths built on the array.

pub mod apps;
pub mod array;
pub mod cost;
pub mod device;
pub mod error;
pub mod gates;

pub use error::{Error, Result};

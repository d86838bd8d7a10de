// Copyright 2026 The chargeq Developers
// SPDX-License-Identifier: Apache-2.0

//! Simulation of double- and triple-dot charge qubits: spectra, pulsed
//! gates, quasistatic noise, process tomography and device geometry.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod qmath;

pub use error::{Error, Result};
pub mod calibrate;
pub mod dynamics;
pub mod geometry;
pub mod model;
pub mod noise;
pub mod spectrum;
pub mod tomography;
pub mod twoqubit;

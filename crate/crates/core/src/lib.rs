//! Building blocks for experiments with Schottky groups and the surfaces they
//! uniformize.
//!
//! The crate is organised by subject:
//!
//! * [`moebius`] – Möbius transformations, points of the Riemann sphere and
//!   oriented circles, in floating point and exact Gaussian-rational form.
//! * [`schottky`] – Schottky data validation, reduced words of the free group,
//!   exhaustion counts and nested-disk approximations of limit sets.
//! * [`cantor`] – the middle-third Cantor set on `[-1, 1]`, the circles that
//!   cut its complement into pairs of pants, and the resulting pants graph.
//! * [`pants`] – hyperbolic pants (hexagon distances, collars), glued
//!   surfaces, length spectra and the quasiconformal length-distortion test.
//! * [`qc`] – equivariant boundary homeomorphisms of the real line, their
//!   quasi-symmetry constants, conformal barycenters and the Douady-Earle
//!   extension with its Beltrami coefficient.
//! * [`trivalent`] – trivalent graphs with a distinguished doubling edge and
//!   the isomorphism search used to compare pants decompositions.

pub mod cantor;
pub mod moebius;
pub mod pants;
pub mod qc;
pub mod schottky;
pub mod trivalent;

pub use num_complex::Complex64;

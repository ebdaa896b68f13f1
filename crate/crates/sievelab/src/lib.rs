//! Numerical experiments around large-sieve inequalities for sparse sets of
//! moduli and equidistribution of primes in arithmetic progressions.
//!
//! The crate is organized bottom-up:
//!
//! * [`arithmetic`] — linear sieve tables: Λ, φ, μ, τ, smallest prime factor,
//!   and the squarefree kernel, plus a binary cache.
//! * [`dirichlet`] — Dirichlet characters by CRT generator decomposition,
//!   with exact rational rotations, conductors, and Gauss sums.
//! * [`sparse`] — sparse moduli sets S, the scaled sets S_t, dyadic windows
//!   S(R), and well-distribution diagnostics.
//! * [`large_sieve`] — additive and multiplicative large-sieve energies and
//!   the classical / sparse / conjectured right sides, plus a bilinear form.
//! * [`progressions`] — ψ(y; q, a) and ψ(y, χ), the mean-square and
//!   worst-residue theorem sums over sparse or square moduli, and the exact
//!   Vaughan decomposition.
//! * [`am2`] — the application to primes p = a·m² + 1 with small squarefree
//!   part.
//!
//! Every floating-point reduction uses plain ascending-order summation over a
//! canonical term order, so results are reproducible bit for bit regardless
//! of thread count.

pub mod am2;
pub mod arithmetic;
pub mod dirichlet;
pub mod error;
pub mod large_sieve;
pub mod output;
pub mod progressions;
pub mod sparse;

pub use arithmetic::SieveTables;
pub use dirichlet::{character_group, Character, CharacterGroup};
pub use error::{Error, Result};
pub use sparse::ModuliSet;

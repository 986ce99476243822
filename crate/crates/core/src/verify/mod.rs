//! The verification suites.
//!
//! Five suites, each producing a [`report::VerificationReport`]:
//!
//! * `cover`  — symbolic identities over Q: chart patches, polynomial matrix
//!   inverses, system/family compositions, closure loci (no sampling).
//! * `witness` — every witness matrix checked at randomized rational points
//!   and exhaustively over F_3 (closure rows also over F_5).
//! * `minor`  — the determinant-cleared minor parametrization of the orbit
//!   maps, symbolically and at sampled invertible matrices.
//! * `action` — the group-action laws (identity, composition, scaling,
//!   Lie-membership invariance), sampled over Q and exhausted over F_2.
//! * `sets`   — exhaustive finite-field enumeration: orbit and variety
//!   counts, set equalities between the different descriptions, stability.
//!
//! All randomness flows from a single seed through per-suite streams, so a
//! full run is reproducible; see [`SuiteConfig`].

pub mod action;
pub mod cover;
pub mod minor;
pub mod pointset;
pub mod report;
pub mod sets;
pub mod witness;

use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::atlas::{Atlas, Mutation};
use crate::field::{FieldDescriptor, FieldError, Scalar};
use crate::poly::{MultiPoly, VarTable};
use report::VerificationReport;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum VerifyError {
    #[error("bad prime {0}: {1}")]
    BadPrime(u64, FieldError),
    #[error("unknown suite `{0}` (expected all, cover, witness, minor, action or sets)")]
    UnknownSuite(String),
    #[error("bad configuration: {0}")]
    BadConfig(String),
}

/// Shared configuration for all suites.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    /// Primes for the exhaustive finite-field checks.
    pub primes: Vec<u64>,
    /// Randomized trials per sampled claim.
    pub trials: usize,
    /// Master seed; every suite derives its own independent stream.
    pub seed: u64,
    /// Rational samples use numerators in [-bound, bound] and denominators
    /// in [1, bound].
    pub sample_bound: i64,
    /// Cap on enumeration candidate counts (matrix and point sweeps).
    pub budget: u64,
    /// Optional injected data fault, for exercising the failure paths.
    pub mutation: Option<Mutation>,
}

impl Default for SuiteConfig {
    fn default() -> SuiteConfig {
        SuiteConfig {
            primes: vec![2, 3],
            trials: 1000,
            seed: 42,
            sample_bound: 20,
            budget: 2_000_000,
            mutation: None,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), VerifyError> {
        for &p in &self.primes {
            FieldDescriptor::prime(p).map_err(|e| VerifyError::BadPrime(p, e))?;
        }
        if self.primes.is_empty() {
            return Err(VerifyError::BadConfig("no primes given".into()));
        }
        if self.trials == 0 {
            return Err(VerifyError::BadConfig("trials must be at least 1".into()));
        }
        if self.sample_bound < 2 {
            return Err(VerifyError::BadConfig(
                "sample bound must be at least 2".into(),
            ));
        }
        if let Some(m) = self.mutation {
            Atlas::with_mutation(FieldDescriptor::RATIONAL, m)
                .map_err(|e| VerifyError::BadConfig(e.to_string()))?;
        }
        Ok(())
    }

    /// The catalogue over `field`, with the configured fault (if any) applied.
    pub fn atlas(&self, field: &FieldDescriptor) -> Atlas {
        match self.mutation {
            Some(m) => Atlas::with_mutation(*field, m).expect("validated mutation"),
            None => Atlas::new(*field),
        }
    }

    /// A deterministic per-label random stream derived from the master seed.
    pub fn rng(&self, label: &str) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(fnv1a(label.as_bytes()));
        rng
    }

    /// A random rational with numerator in [-bound, bound], denominator in
    /// [1, bound].
    pub fn sample_rational(&self, rng: &mut ChaCha8Rng) -> Scalar {
        Scalar::ratio(
            rng.gen_range(-self.sample_bound..=self.sample_bound),
            rng.gen_range(1..=self.sample_bound),
        )
    }

    pub fn sample_nonzero_rational(&self, rng: &mut ChaCha8Rng) -> Scalar {
        loop {
            let s = self.sample_rational(rng);
            if !s.is_zero() {
                return s;
            }
        }
    }
}

/// 64-bit FNV-1a; used for stable per-suite stream ids (std hashers make no
/// cross-version stability promise).
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Runs one suite by name.
pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<VerificationReport, VerifyError> {
    cfg.validate()?;
    let start = Instant::now();
    let mut report = match name {
        "all" => return run_all(cfg),
        "cover" => cover::run(cfg),
        "witness" => witness::run(cfg),
        "minor" => minor::run(cfg),
        "action" => action::run(cfg),
        "sets" => sets::run(cfg),
        other => return Err(VerifyError::UnknownSuite(other.into())),
    };
    report.duration_ms = Some(start.elapsed().as_millis() as u64);
    Ok(report)
}

/// Runs every suite and merges the results into a single report.
pub fn run_all(cfg: &SuiteConfig) -> Result<VerificationReport, VerifyError> {
    cfg.validate()?;
    let parts = ["cover", "witness", "minor", "action", "sets"]
        .iter()
        .map(|name| run_suite(name, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(VerificationReport::merge("all", cfg.seed, &cfg.primes, parts))
}

// ---------------------------------------------------------------------------
// Shared symbolic machinery for the cover and minor suites.
// ---------------------------------------------------------------------------

/// Symbolic right action on the flat (i,j,s) coordinates:
///
///   out_{ijs} = sum_{p,q,r} g[p][i] * g[q][j] * v_{pqr} * h[s][r]
///
/// With `h` the true inverse of `g` this is act(v, g); with `h` the adjugate
/// it is det(g) * act(v, g), which stays polynomial.  `g` and `h` are
/// row-major 3x3; `v` has 27 entries in flat order.
pub(crate) fn act_symbolic(v: &[MultiPoly], g: &[MultiPoly], h: &[MultiPoly]) -> Vec<MultiPoly> {
    assert_eq!(v.len(), 27);
    assert_eq!(g.len(), 9);
    assert_eq!(h.len(), 9);
    let table = v[0].table();
    let field = v[0].field();
    let e = |r: usize, c: usize| &g[(r - 1) * 3 + (c - 1)];
    let einv = |r: usize, c: usize| &h[(r - 1) * 3 + (c - 1)];
    let mut out = vec![MultiPoly::zero(table, field); 27];
    for p in 1..=3usize {
        for q in 1..=3usize {
            for r in 1..=3usize {
                let src = &v[(p - 1) * 9 + (q - 1) * 3 + (r - 1)];
                if src.is_zero() {
                    continue;
                }
                for i in 1..=3usize {
                    for j in 1..=3usize {
                        let gg = &(e(p, i) * e(q, j)) * src;
                        for s in 1..=3usize {
                            let dst = (i - 1) * 9 + (j - 1) * 3 + (s - 1);
                            out[dst] = &out[dst] + &(&gg * einv(s, r));
                        }
                    }
                }
            }
        }
    }
    out
}

/// The unsigned 2x2 minor of a symbolic 3x3 matrix obtained by deleting row
/// `r` and column `c` (1-based).
pub(crate) fn minor_poly(g: &[MultiPoly], r: usize, c: usize) -> MultiPoly {
    let rows: Vec<usize> = (1..=3).filter(|&x| x != r).collect();
    let cols: Vec<usize> = (1..=3).filter(|&x| x != c).collect();
    let e = |r: usize, c: usize| &g[(r - 1) * 3 + (c - 1)];
    &(e(rows[0], cols[0]) * e(rows[1], cols[1])) - &(e(rows[0], cols[1]) * e(rows[1], cols[0]))
}

/// Adjugate of a symbolic 3x3 matrix: adj[s][r] = (-1)^{r+s} minor(r, s),
/// so that g * adj = det(g) * I.
pub(crate) fn adjugate_poly(g: &[MultiPoly]) -> Vec<MultiPoly> {
    let mut out = Vec::with_capacity(9);
    for s in 1..=3usize {
        for r in 1..=3usize {
            let m = minor_poly(g, r, s);
            out.push(if (r + s) % 2 == 0 { m } else { -&m });
        }
    }
    out
}

/// Symbolic 3x3 determinant.
pub(crate) fn det_poly(g: &[MultiPoly]) -> MultiPoly {
    let e = |r: usize, c: usize| &g[(r - 1) * 3 + (c - 1)];
    let mut acc = &(e(1, 1) * &minor_poly(g, 1, 1)) - &(e(1, 2) * &minor_poly(g, 1, 2));
    acc = &acc + &(e(1, 3) * &minor_poly(g, 1, 3));
    acc
}

/// A 3x3 matrix of fresh variables g11..g33 (row-major) over its own table.
pub(crate) fn generic_matrix(field: &FieldDescriptor) -> (Arc<VarTable>, Vec<MultiPoly>) {
    let names: Vec<String> = (1..=3)
        .flat_map(|r| (1..=3).map(move |c| format!("g{r}{c}")))
        .collect();
    let table = VarTable::new(names).unwrap();
    let vars = (0..9)
        .map(|i| MultiPoly::var(&table, field, i))
        .collect();
    (table, vars)
}

/// A structure vector's coordinates as constant polynomials over `table`.
pub(crate) fn constant_vector(
    v: &crate::structure::StructureVector,
    table: &Arc<VarTable>,
) -> Vec<MultiPoly> {
    v.coords()
        .iter()
        .map(|c| MultiPoly::constant(table, c.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{act, SquareMatrix, StructureVector};
    use rand::Rng;

    #[test]
    fn config_validation() {
        assert!(SuiteConfig::default().validate().is_ok());
        let cfg = SuiteConfig {
            primes: vec![4],
            ..SuiteConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(VerifyError::BadPrime(4, _))));
        let cfg = SuiteConfig {
            trials: 0,
            ..SuiteConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = SuiteConfig {
            mutation: Some(Mutation::CutSign { gen: 99, term: 0 }),
            ..SuiteConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn rng_streams_are_deterministic_and_distinct() {
        let cfg = SuiteConfig::default();
        let a: u64 = cfg.rng("cover").gen();
        let b: u64 = cfg.rng("cover").gen();
        let c: u64 = cfg.rng("witness").gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let other = SuiteConfig {
            seed: 43,
            ..SuiteConfig::default()
        };
        let d: u64 = other.rng("cover").gen();
        assert_ne!(a, d);
    }

    #[test]
    fn unknown_suite_is_rejected() {
        let cfg = SuiteConfig::default();
        assert!(matches!(
            run_suite("bogus", &cfg),
            Err(VerifyError::UnknownSuite(_))
        ));
    }

    /// The adjugate identity g * adj(g) = det(g) * I, symbolically.
    #[test]
    fn adjugate_identity_symbolic()
    {
        let f = FieldDescriptor::RATIONAL;
        let (table, g) = generic_matrix(&f);
        let adj = adjugate_poly(&g);
        let det = det_poly(&g);
        for r in 1..=3usize {
            for c in 1..=3usize {
                let mut acc = MultiPoly::zero(&table, &f);
                for k in 1..=3usize {
                    acc = &acc + &(&g[(r - 1) * 3 + (k - 1)] * &adj[(k - 1) * 3 + (c - 1)]);
                }
                let expect = if r == c {
                    det.clone()
                } else {
                    MultiPoly::zero(&table, &f)
                };
                assert_eq!(acc, expect, "entry ({r},{c})");
            }
        }
    }

    /// act_symbolic with the adjugate, evaluated at a numeric matrix,
    /// matches det * act computed by the concrete action.
    #[test]
    fn symbolic_action_matches_numeric_action() {
        let f = FieldDescriptor::RATIONAL;
        let cfg = SuiteConfig::default();
        let atlas = Atlas::new(f);
        let (table, g) = generic_matrix(&f);
        let adj = adjugate_poly(&g);
        let det = det_poly(&g);
        let eta = atlas.base_vector(crate::atlas::BaseVector::Heisenberg);
        let sym = act_symbolic(&constant_vector(&eta, &table), &g, &adj);
        let mut rng = cfg.rng("modtest");
        for _ in 0..20 {
            let vals: Vec<Scalar> = (0..9).map(|_| cfg.sample_rational(&mut rng)).collect();
            let m = SquareMatrix::from_rows(vals.chunks(3).map(|c| c.to_vec()).collect()).unwrap();
            let d = det.eval(&vals);
            assert_eq!(d, m.det());
            if d.is_zero() {
                continue;
            }
            let acted = act(&eta, &m).unwrap();
            let expect: Vec<Scalar> = acted.coords().iter().map(|c| &d * c).collect();
            let got: Vec<Scalar> = sym.iter().map(|p| p.eval(&vals)).collect();
            assert_eq!(got, expect);
            let _ = StructureVector::from_coords(3, &f, got).unwrap();
        }
    }
}

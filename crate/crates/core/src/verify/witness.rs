//! Checks of every stored witness matrix and closure row.
//!
//! For each witness row the suite verifies, at many exactly-sampled rational
//! parameter points and exhaustively over F_3, that
//!
//! * the parameter point satisfies the row's condition,
//! * the stored determinant formula matches the cofactor determinant and is
//!   nonzero there, and
//! * acting on the row's base vector by the instantiated matrix lands
//!   exactly on the row's family instance.
//!
//! Rows without witnesses (8, 12, 16) are instead checked to vanish on the
//! refined affine system, exhaustively over both F_3 and F_5.  Rational
//! sampling solves the rows' equality constraints exactly (e.g. mu =
//! phi*gamma/alpha) and uses rejection only for inequations.

use rand_chacha::ChaCha8Rng;

use crate::atlas::{Atlas, RowOutcome, SystemName, WitnessMatrix};
use crate::field::{FieldDescriptor, Scalar};
use crate::poly::VarTable;
use crate::structure::act;

use super::report::VerificationReport;
use super::SuiteConfig;

fn fmt_params(table: &VarTable, vals: &[Scalar]) -> String {
    table
        .names()
        .iter()
        .zip(vals)
        .map(|(n, v)| format!("{n}={v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// act(base, matrix) == family(params), with the determinant formula
/// cross-checked against the cofactor determinant and required nonzero.
fn check_witness_at(atlas: &Atlas, wit: &WitnessMatrix, vals: &[Scalar]) -> Result<(), String> {
    let ctx = || fmt_params(&wit.params, vals);
    let (m, det) = wit
        .instantiate(vals)
        .map_err(|e| format!("{e} at {}", ctx()))?;
    if m.det() != det {
        return Err(format!(
            "stored determinant {det} differs from cofactor determinant {} at {}",
            m.det(),
            ctx()
        ));
    }
    if det.is_zero() {
        return Err(format!("determinant vanishes at {}", ctx()));
    }
    let target = atlas
        .family(wit.target)
        .eval(vals)
        .expect("parameter arity");
    let moved = act(&atlas.base_vector(wit.base), &m).expect("matching fields");
    if moved != target {
        return Err(format!(
            "base moves to {moved} instead of {target} at {}",
            ctx()
        ));
    }
    Ok(())
}

/// The row's family instance vanishes on the refined affine system.
fn check_closure_at(
    atlas: &Atlas,
    row_index: usize,
    vals: &[Scalar],
) -> Result<(), String> {
    let row = atlas.table_row(row_index);
    let inst = atlas
        .family(row.family)
        .eval(vals)
        .expect("parameter arity");
    let splus = atlas.system(SystemName::AffineSystemPlus);
    if let Some((idx, value)) = splus.first_violation(inst.coords()) {
        let fam = atlas.family(row.family);
        return Err(format!(
            "generator {idx} of {} evaluates to {value} at {}",
            splus.name(),
            fmt_params(fam.params(), vals)
        ));
    }
    Ok(())
}

/// A rational parameter point satisfying the row's condition: equality
/// constraints solved exactly, inequations by rejection with a retry valve.
fn sample_row_params(
    idx: usize,
    cfg: &SuiteConfig,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<Scalar>> {
    const VALVE: usize = 100_000;
    let r = |rng: &mut ChaCha8Rng| cfg.sample_rational(rng);
    let nz = |rng: &mut ChaCha8Rng| cfg.sample_nonzero_rational(rng);
    let zero = Scalar::zero(&FieldDescriptor::RATIONAL);
    for _ in 0..VALVE {
        let vals = match idx {
            1 => {
                let (a, b, c, m, n, p) = (nz(rng), r(rng), r(rng), r(rng), r(rng), r(rng));
                if (&(&m * &a) - &(&p * &c)).is_zero() || (&(&n * &a) - &(&p * &b)).is_zero() {
                    continue;
                }
                vec![a, b, c, m, n, p]
            }
            2 => {
                let (a, b, c, p, n) = (nz(rng), r(rng), nz(rng), nz(rng), r(rng));
                if (&(&n * &a) - &(&p * &b)).is_zero() {
                    continue;
                }
                let m = &(&p * &c) * &a.inv().unwrap();
                vec![a, b, c, m, n, p]
            }
            3 => {
                let (a, b, c, n) = (nz(rng), r(rng), r(rng), nz(rng));
                vec![a, b, c, zero.clone(), n, zero.clone()]
            }
            4 => {
                let (a, b, p, n) = (nz(rng), r(rng), nz(rng), r(rng));
                if (&(&n * &a) - &(&p * &b)).is_zero() {
                    continue;
                }
                vec![a, b, zero.clone(), zero.clone(), n, p]
            }
            5 => {
                let (a, b, c, m, p) = (nz(rng), nz(rng), nz(rng), r(rng), r(rng));
                if (&(&m * &a) - &(&p * &c)).is_zero() {
                    continue;
                }
                let n = &(&p * &b) * &a.inv().unwrap();
                vec![a, b, c, m, n, p]
            }
            6 => {
                let (a, b, m, p) = (nz(rng), r(rng), nz(rng), r(rng));
                let n = &(&p * &b) * &a.inv().unwrap();
                vec![a, b, zero.clone(), m, n, p]
            }
            7 => {
                let (a, c, m, p) = (nz(rng), r(rng), r(rng), r(rng));
                if (&(&m * &a) - &(&p * &c)).is_zero() {
                    continue;
                }
                vec![a, zero.clone(), c, m, zero.clone(), p]
            }
            8 => {
                let (a, b, c, p) = (nz(rng), r(rng), r(rng), r(rng));
                let ainv = a.inv().unwrap();
                let m = &(&p * &c) * &ainv;
                let n = &(&p * &b) * &ainv;
                vec![a, b, c, m, n, p]
            }
            9 => {
                let (s, t, rho, z) = (r(rng), r(rng), nz(rng), r(rng));
                if (&(&t * &z) - &s).is_zero() {
                    continue;
                }
                vec![s, t, rho, z]
            }
            10 => {
                let (t, rho, z) = (r(rng), nz(rng), r(rng));
                vec![&t * &z, t, rho, z]
            }
            11 => {
                let (s, t, z) = (r(rng), r(rng), r(rng));
                if (&(&t * &z) - &s).is_zero() {
                    continue;
                }
                vec![s, t, zero.clone(), z]
            }
            12 => {
                let (t, z) = (r(rng), r(rng));
                vec![&t * &z, t, zero.clone(), z]
            }
            13 => vec![r(rng), nz(rng), nz(rng)],
            14 => vec![r(rng), zero.clone(), nz(rng)],
            15 => vec![r(rng), nz(rng), zero.clone()],
            16 => vec![r(rng), zero.clone(), zero.clone()],
            _ => unreachable!("row index in 1..=16"),
        };
        return Some(vals);
    }
    None
}

/// All parameter tuples of `arity` digits over F_p, in odometer order.
fn fp_tuples(p: u64, arity: usize, field: &FieldDescriptor) -> impl Iterator<Item = Vec<Scalar>> + '_ {
    let total = p.pow(arity as u32);
    (0..total).map(move |code| {
        let mut c = code;
        (0..arity)
            .map(|_| {
                let v = Scalar::from_int(field, (c % p) as i64);
                c /= p;
                v
            })
            .collect()
    })
}

fn sampled_claim<F>(
    cfg: &SuiteConfig,
    rng: &mut ChaCha8Rng,
    row_index: usize,
    condition_holds: impl Fn(&[Scalar]) -> bool,
    mut body: F,
) -> Result<(), String>
where
    F: FnMut(&[Scalar]) -> Result<(), String>,
{
    for trial in 0..cfg.trials {
        let Some(vals) = sample_row_params(row_index, cfg, rng) else {
            return Err("sampling valve tripped: could not hit the condition".into());
        };
        if !condition_holds(&vals) {
            return Err(format!(
                "internal sampler left the condition locus on trial {trial}"
            ));
        }
        body(&vals).map_err(|e| format!("trial {trial}: {e}"))?;
    }
    Ok(())
}

fn sweep_claim<F>(
    p: u64,
    field: &FieldDescriptor,
    arity: usize,
    condition_holds: impl Fn(&[Scalar]) -> bool,
    mut body: F,
) -> Result<(), String>
where
    F: FnMut(&[Scalar]) -> Result<(), String>,
{
    let mut checked = 0u64;
    for vals in fp_tuples(p, arity, field) {
        if !condition_holds(&vals) {
            continue;
        }
        checked += 1;
        body(&vals)?;
    }
    if checked == 0 {
        return Err(format!("the condition locus over F_{p} is empty"));
    }
    Ok(())
}

/// The claims for one table row; shared by the full suite and the
/// single-row entry point used for fault injection.
fn row_claims(cfg: &SuiteConfig, idx: usize, rep: &mut VerificationReport) {
    let q = FieldDescriptor::RATIONAL;
    let atlas_q = cfg.atlas(&q);
    let row_q = atlas_q.table_row(idx);
    let mut rng = cfg.rng(&format!("witness-row{idx:02}"));
    let label = row_q.label();

    match &row_q.outcome {
        RowOutcome::Witness(wit) => {
            let wit = wit.clone();
            let outcome = sampled_claim(
                cfg,
                &mut rng,
                idx,
                |vals| row_q.condition.holds(vals),
                |vals| check_witness_at(&atlas_q, &wit, vals),
            );
            rep.record(
                format!("witness_{label}_samples"),
                format!(
                    "the {} matrix carries the affine base onto the {} chart at {} solved rational points, determinant formula cross-checked",
                    label,
                    row_q.family.id(),
                    cfg.trials
                ),
                outcome,
            );

            let f3 = FieldDescriptor::prime(3).unwrap();
            let atlas3 = cfg.atlas(&f3);
            let row3 = atlas3.table_row(idx);
            let RowOutcome::Witness(wit3) = row3.outcome.clone() else {
                unreachable!("row kind is field-independent");
            };
            let outcome = sweep_claim(
                3,
                &f3,
                wit3.params.len(),
                |vals| row3.condition.holds(vals),
                |vals| check_witness_at(&atlas3, &wit3, vals),
            );
            rep.record(
                format!("witness_{label}_sweep_f3"),
                format!(
                    "the {} identity holds at every F_3 parameter point satisfying the row condition",
                    label
                ),
                outcome,
            );
        }
        RowOutcome::InClosure => {
            let outcome = sampled_claim(
                cfg,
                &mut rng,
                idx,
                |vals| row_q.condition.holds(vals),
                |vals| check_closure_at(&atlas_q, idx, vals),
            );
            rep.record(
                format!("witness_{label}_samples"),
                format!(
                    "row {idx} instances on the solved equality locus satisfy the refined affine system at {} rational points",
                    cfg.trials
                ),
                outcome,
            );

            for p in [3u64, 5] {
                let f = FieldDescriptor::prime(p).unwrap();
                let atlas_p = cfg.atlas(&f);
                let row_p = atlas_p.table_row(idx);
                let arity = atlas_p.family(row_p.family).arity();
                let outcome = sweep_claim(
                    p,
                    &f,
                    arity,
                    |vals| row_p.condition.holds(vals),
                    |vals| check_closure_at(&atlas_p, idx, vals),
                );
                rep.record(
                    format!("witness_{label}_sweep_f{p}"),
                    format!(
                        "every F_{p} point of the row-{idx} locus satisfies the refined affine system"
                    ),
                    outcome,
                );
            }
        }
    }
}

/// Claims for the three cover witnesses onto the numbered Heisenberg charts.
fn cover_claims(cfg: &SuiteConfig, rep: &mut VerificationReport) {
    let q = FieldDescriptor::RATIONAL;
    let atlas_q = cfg.atlas(&q);
    let f3 = FieldDescriptor::prime(3).unwrap();
    let atlas3 = cfg.atlas(&f3);

    for (i, wit) in atlas_q.cover_witnesses().into_iter().enumerate() {
        let mut rng = cfg.rng(&format!("witness-{}", wit.label));
        let arity = wit.params.len();
        // conditions here are a single `variable != 0`: plain rejection
        let sample = |rng: &mut ChaCha8Rng| -> Vec<Scalar> {
            loop {
                let vals: Vec<Scalar> = (0..arity).map(|_| cfg.sample_rational(rng)).collect();
                if wit.condition.holds(&vals) {
                    return vals;
                }
            }
        };
        let mut outcome = Ok(());
        for trial in 0..cfg.trials {
            let vals = sample(&mut rng);
            if let Err(e) = check_witness_at(&atlas_q, &wit, &vals) {
                outcome = Err(format!("trial {trial}: {e}"));
                break;
            }
        }
        rep.record(
            format!("witness_{}_samples", wit.label),
            format!(
                "the {} cover matrix carries the two-step nilpotent base onto the {} chart at {} rational points",
                wit.label,
                wit.target.id(),
                cfg.trials
            ),
            outcome,
        );

        let wit3 = atlas3.cover_witnesses().remove(i);
        let outcome = sweep_claim(
            3,
            &f3,
            arity,
            |vals| wit3.condition.holds(vals),
            |vals| check_witness_at(&atlas3, &wit3, vals),
        );
        rep.record(
            format!("witness_{}_sweep_f3", wit.label),
            format!(
                "the {} cover identity holds at every admissible F_3 parameter point",
                wit.label
            ),
            outcome,
        );
    }
}

pub fn run(cfg: &SuiteConfig) -> VerificationReport {
    let mut rep = VerificationReport::new("witness", cfg.seed, &cfg.primes);
    cover_claims(cfg, &mut rep);
    for idx in 1..=16 {
        row_claims(cfg, idx, &mut rep);
    }
    rep.finalize();
    rep
}

/// Just the claims of a single table row — the entry point the fault
/// injection tests drive, with the mutation installed in `cfg`.
pub fn check_single_row(cfg: &SuiteConfig, row_index: usize) -> VerificationReport {
    let mut rep = VerificationReport::new(
        format!("witness-row{row_index:02}"),
        cfg.seed,
        &cfg.primes,
    );
    row_claims(cfg, row_index, &mut rep);
    rep.finalize();
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::Mutation;

    #[test]
    fn single_rows_pass_quickly() {
        let cfg = SuiteConfig {
            trials: 40,
            ..SuiteConfig::default()
        };
        for idx in [1usize, 8, 10, 13] {
            let rep = check_single_row(&cfg, idx);
            assert!(rep.passed(), "row {idx}:\n{}", rep.render_text());
        }
    }

    #[test]
    fn entry_fault_is_caught_by_its_row() {
        let cfg = SuiteConfig {
            trials: 25,
            mutation: Some(Mutation::RowEntrySign { row: 1, entry: 0 }),
            ..SuiteConfig::default()
        };
        let rep = check_single_row(&cfg, 1);
        assert!(!rep.passed());
        let fail = rep
            .claims
            .iter()
            .find(|c| c.status == super::super::report::Status::Fail)
            .expect("a failing claim");
        assert!(fail.counterexample.is_some());
        // other rows stay green under this fault
        let rep = check_single_row(&cfg, 2);
        assert!(rep.passed());
    }

    #[test]
    fn samplers_hit_their_conditions() {
        let cfg = SuiteConfig::default();
        let q = FieldDescriptor::RATIONAL;
        let atlas = cfg.atlas(&q);
        let mut rng = cfg.rng("sampler-test");
        for idx in 1..=16 {
            let row = atlas.table_row(idx);
            for _ in 0..50 {
                let vals = sample_row_params(idx, &cfg, &mut rng).unwrap();
                assert!(row.condition.holds(&vals), "row {idx} at {vals:?}");
            }
        }
    }
}

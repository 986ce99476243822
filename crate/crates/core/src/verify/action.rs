//! The change-of-basis action itself: identity, composition, scaling, and
//! invariance of the Lie conditions — sampled over Q and exhausted over F_2.

use rand_chacha::ChaCha8Rng;

use crate::atlas::{FamilyName, SystemName};
use crate::field::{FieldDescriptor, Scalar};
use crate::structure::{act, gl_enumerate, SquareMatrix, StructureVector};

use super::report::VerificationReport;
use super::SuiteConfig;

fn random_vector(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> StructureVector {
    let coords = (0..27).map(|_| cfg.sample_rational(rng)).collect();
    StructureVector::from_coords(3, &FieldDescriptor::RATIONAL, coords).unwrap()
}

fn random_invertible(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> SquareMatrix {
    loop {
        let entries: Vec<Scalar> = (0..9).map(|_| cfg.sample_rational(rng)).collect();
        let m = SquareMatrix::from_rows(entries.chunks(3).map(|c| c.to_vec()).collect()).unwrap();
        if !m.det().is_zero() {
            return m;
        }
    }
}

/// Every instance of every family over F_2 (all parameter tuples).
fn all_f2_instances(cfg: &SuiteConfig) -> Vec<StructureVector> {
    let f2 = FieldDescriptor::prime(2).unwrap();
    let atlas = cfg.atlas(&f2);
    let mut out = Vec::new();
    for name in FamilyName::ALL {
        let fam = atlas.family(name);
        let arity = fam.arity() as u32;
        for code in 0..2u64.pow(arity) {
            let vals: Vec<Scalar> = (0..arity)
                .map(|b| Scalar::from_int(&f2, ((code >> b) & 1) as i64))
                .collect();
            out.push(fam.eval(&vals).unwrap());
        }
    }
    out
}

pub fn run(cfg: &SuiteConfig) -> VerificationReport {
    let q = FieldDescriptor::RATIONAL;
    let atlas = cfg.atlas(&q);
    let mut rep = VerificationReport::new("action", cfg.seed, &cfg.primes);

    // identity law, sampled over Q
    {
        let mut rng = cfg.rng("action-identity");
        let id = SquareMatrix::identity(3, &q);
        let mut outcome = Ok(());
        for trial in 0..cfg.trials {
            let v = random_vector(cfg, &mut rng);
            let moved = act(&v, &id).unwrap();
            if moved != v {
                outcome = Err(format!("trial {trial}: identity moves {v} to {moved}"));
                break;
            }
        }
        rep.record(
            "action_identity_sampled_q",
            format!("acting by the identity matrix fixes {} random rational vectors", cfg.trials),
            outcome,
        );
    }

    // identity law, exhaustively over every F_2 family instance
    {
        let f2 = FieldDescriptor::prime(2).unwrap();
        let id = SquareMatrix::identity(3, &f2);
        let instances = all_f2_instances(cfg);
        let total = instances.len();
        let mut outcome = Ok(());
        for v in instances {
            let moved = act(&v, &id).unwrap();
            if moved != v {
                outcome = Err(format!("identity moves {v} to {moved}"));
                break;
            }
        }
        rep.record(
            "action_identity_exhaustive_f2",
            format!("acting by the identity fixes all {total} F_2 family instances"),
            outcome,
        );
    }

    // composition law over Q: act(act(v,g),h) = act(v, g*h)
    {
        let mut rng = cfg.rng("action-composition");
        let trials = cfg.trials.min(500);
        let mut outcome = Ok(());
        for trial in 0..trials {
            let v = random_vector(cfg, &mut rng);
            let g = random_invertible(cfg, &mut rng);
            let h = random_invertible(cfg, &mut rng);
            let two_step = act(&act(&v, &g).unwrap(), &h).unwrap();
            let one_step = act(&v, &g.mul(&h)).unwrap();
            if two_step != one_step {
                outcome = Err(format!(
                    "trial {trial}: stepwise action gives {two_step}, product action gives {one_step}"
                ));
                break;
            }
        }
        rep.record(
            "action_composition_sampled_q",
            format!("act(act(v,g),h) = act(v,g*h) at {trials} random rational triples"),
            outcome,
        );
    }

    // composition law, exhaustively over GL(3,2) x GL(3,2) for a spread of
    // base points (both orbits, their charts, and the zero vector)
    {
        let f2 = FieldDescriptor::prime(2).unwrap();
        let atlas2 = cfg.atlas(&f2);
        let one = Scalar::one(&f2);
        let mut points = vec![
            atlas2.base_vector(crate::atlas::BaseVector::Heisenberg),
            atlas2.base_vector(crate::atlas::BaseVector::Affine),
            atlas2.base_vector(crate::atlas::BaseVector::Zero),
        ];
        for name in FamilyName::ALL {
            let fam = atlas2.family(name);
            let ones = vec![one.clone(); fam.arity()];
            points.push(fam.eval(&ones).unwrap());
        }
        let gl: Vec<SquareMatrix> = gl_enumerate(3, 2, cfg.budget)
            .expect("GL(3,2) fits every budget")
            .collect();
        let mut outcome = Ok(());
        'outer: for v in &points {
            for g in &gl {
                let moved = act(v, g).unwrap();
                for h in &gl {
                    let two_step = act(&moved, h).unwrap();
                    let one_step = act(v, &g.mul(h)).unwrap();
                    if two_step != one_step {
                        outcome = Err(format!(
                            "composition fails at v={v}, g={g:?}, h={h:?}"
                        ));
                        break 'outer;
                    }
                }
            }
        }
        rep.record(
            "action_composition_exhaustive_f2",
            format!(
                "the composition law holds for {} base points against all {} x {} pairs from GL(3,2)",
                points.len(),
                gl.len(),
                gl.len()
            ),
            outcome,
        );
    }

    // scaling law: act(v, c*g) = c * act(v, g)
    {
        let mut rng = cfg.rng("action-scaling");
        let mut outcome = Ok(());
        for trial in 0..cfg.trials {
            let v = random_vector(cfg, &mut rng);
            let g = random_invertible(cfg, &mut rng);
            let c = cfg.sample_nonzero_rational(&mut rng);
            let scaled_matrix = act(&v, &g.scalar_mul(&c)).unwrap();
            let base = act(&v, &g).unwrap();
            let scaled_vector = StructureVector::from_coords(
                3,
                &q,
                base.coords().iter().map(|x| &c * x).collect(),
            )
            .unwrap();
            if scaled_matrix != scaled_vector {
                outcome = Err(format!(
                    "trial {trial}: act(v, c*g) = {scaled_matrix} but c*act(v,g) = {scaled_vector}"
                ));
                break;
            }
        }
        rep.record(
            "action_scaling_sampled_q",
            format!("act(v, c*g) = c * act(v, g) at {} random rational samples", cfg.trials),
            outcome,
        );
    }

    // the Lie conditions are invariant: family instances (which satisfy
    // them) keep satisfying them after any change of basis
    {
        let mut rng = cfg.rng("action-lie");
        let jacobi = atlas.system(SystemName::Jacobi);
        let mut outcome = Ok(());
        for trial in 0..cfg.trials.min(300) {
            let name = FamilyName::ALL[trial % FamilyName::ALL.len()];
            let fam = atlas.family(name);
            let vals: Vec<Scalar> = (0..fam.arity())
                .map(|_| cfg.sample_rational(&mut rng))
                .collect();
            let v = fam.eval(&vals).unwrap();
            debug_assert!(jacobi.vanishes_at(v.coords()));
            let g = random_invertible(cfg, &mut rng);
            let moved = act(&v, &g).unwrap();
            if let Some((idx, value)) = jacobi.first_violation(moved.coords()) {
                outcome = Err(format!(
                    "trial {trial}: moving a {} instance broke Lie generator {idx} (value {value})",
                    name.id()
                ));
                break;
            }
        }
        rep.record(
            "action_lie_invariance_sampled_q",
            "changing basis never breaks the Lie conditions on family instances (sampled)",
            outcome,
        );
    }

    // ... and vectors violating the Lie conditions keep violating them
    {
        let mut rng = cfg.rng("action-nonlie");
        let jacobi = atlas.system(SystemName::Jacobi);
        let mut outcome = Ok(());
        let mut checked = 0;
        for _ in 0..cfg.trials.min(300) {
            let v = random_vector(cfg, &mut rng);
            if jacobi.vanishes_at(v.coords()) {
                continue; // essentially never happens for random vectors
            }
            checked += 1;
            let g = random_invertible(cfg, &mut rng);
            let moved = act(&v, &g).unwrap();
            if jacobi.vanishes_at(moved.coords()) {
                outcome = Err(format!(
                    "a non-Lie vector {v} became Lie after a change of basis"
                ));
                break;
            }
        }
        if checked == 0 {
            outcome = Err("no non-Lie sample was drawn".into());
        }
        rep.record(
            "action_non_lie_preserved_q",
            "changing basis never repairs a violated Lie condition (sampled)",
            outcome,
        );
    }

    rep.finalize();
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn action_suite_passes() {
        let cfg = SuiteConfig {
            trials: 60, // the full default runs in the acceptance gate
            ..SuiteConfig::default()
        };
        let rep = run(&cfg);
        assert_eq!(rep.claims.len(), 7);
        assert!(rep.passed(), "{}", rep.render_text());
    }
}

//! Symbolic identities over Q, certified at the level of polynomial
//! coefficients — no sampling anywhere in this suite.
//!
//! Inverse-bearing identities (chart patches, closure loci with a divided
//! parameter) work over an extended variable table carrying a formal inverse
//! `v_inv`, and reduce modulo v * v_inv = 1 via
//! [`MultiPoly::cancel_inverse_pair`]; a reduced form of zero certifies the
//! identity wherever v is nonzero, over every field.

use std::sync::Arc;

use crate::atlas::{Atlas, BaseVector, FamilyName, RationalExpr, SystemName, WitnessMatrix};
use crate::field::FieldDescriptor;
use crate::poly::{MultiPoly, VarTable};

use super::report::VerificationReport;
use super::{act_symbolic, constant_vector, SuiteConfig};

/// Re-expresses a polynomial over a superset variable table (match by name).
fn lift_to(poly: &MultiPoly, ext: &Arc<VarTable>) -> MultiPoly {
    let images: Vec<MultiPoly> = poly
        .table()
        .names()
        .iter()
        .map(|n| {
            let idx = ext.index_of(n).expect("extended table is a superset");
            MultiPoly::var(ext, poly.field(), idx)
        })
        .collect();
    poly.substitute(ext, &images)
}

/// A witness entry num/den as a polynomial over the extended table, where the
/// denominator must be 1 or the single variable whose formal inverse sits at
/// `inv_idx`.
fn lift_entry(
    entry: &RationalExpr,
    ext: &Arc<VarTable>,
    var: &str,
    inv_idx: usize,
) -> MultiPoly {
    let num = lift_to(&entry.num, ext);
    let field = num.field();
    let one = MultiPoly::one(entry.den.table(), field);
    if entry.den == one {
        return num;
    }
    let var_idx = entry.den.table().index_of(var).expect("known variable");
    let var_poly = MultiPoly::var(entry.den.table(), field, var_idx);
    assert!(
        entry.den == var_poly,
        "cover witness denominators are single variables"
    );
    &num * &MultiPoly::var(ext, field, inv_idx)
}

/// Per-chart symbolic data: extended table with the formal inverse, the
/// witness matrix as polynomials, and its hand-stated polynomial inverse.
struct ChartPatch {
    family: FamilyName,
    ext: Arc<VarTable>,
    var_idx: usize,
    inv_idx: usize,
    g: Vec<MultiPoly>,
    ginv: Vec<MultiPoly>,
}

fn chart_patch(wit: &WitnessMatrix, inv_entries: [&str; 9]) -> ChartPatch {
    let field = *wit.entries[0].num.field();
    // the condition is `v != 0` for a single variable v: that variable gets
    // the formal inverse
    let atom = &wit.condition.atoms()[0];
    let var = atom.poly.to_string();
    let mut names: Vec<String> = wit.params.names().to_vec();
    names.push(format!("{var}_inv"));
    let ext = VarTable::new(names).unwrap();
    let var_idx = ext.index_of(&var).unwrap();
    let inv_idx = ext.len() - 1;
    let g = wit
        .entries
        .iter()
        .map(|e| lift_entry(e, &ext, &var, inv_idx))
        .collect();
    let ginv = inv_entries
        .iter()
        .map(|src| MultiPoly::parse(&ext, &field, src).unwrap())
        .collect();
    ChartPatch {
        family: wit.target,
        ext,
        var_idx,
        inv_idx,
        g,
        ginv,
    }
}

/// The zero/nonzero check shared by the composition claims: substitutes
/// `images` for the 27 coordinates in every generator of `sys` and demands
/// the results are all zero (or, with `expect_zero = false`, all nonzero).
fn compose_system(
    atlas: &Atlas,
    sys: SystemName,
    ext: &Arc<VarTable>,
    images: &[MultiPoly],
    cancel: Option<(usize, usize)>,
    expect_zero: bool,
) -> Result<(), String> {
    let system = atlas.system(sys);
    for (idx, gen) in system.gens().iter().enumerate() {
        let mut composed = gen.substitute(ext, images);
        if let Some((a, b)) = cancel {
            composed = composed.cancel_inverse_pair(a, b);
        }
        if composed.is_zero() != expect_zero {
            return Err(if expect_zero {
                format!(
                    "generator {idx} of {} composes to {} instead of 0",
                    system.name(),
                    composed
                )
            } else {
                format!(
                    "generator {idx} of {} composes to 0 but should survive",
                    system.name()
                )
            });
        }
    }
    Ok(())
}

/// A family's 27 components lifted onto an extended table.
fn family_images(atlas: &Atlas, name: FamilyName, ext: &Arc<VarTable>) -> Vec<MultiPoly> {
    atlas
        .family(name)
        .components()
        .iter()
        .map(|c| lift_to(c, ext))
        .collect()
}

pub fn run(cfg: &SuiteConfig) -> VerificationReport {
    let field = FieldDescriptor::RATIONAL;
    let atlas = cfg.atlas(&field);
    let mut rep = VerificationReport::new("cover", cfg.seed, &cfg.primes);

    // --- chart patches: the three witnesses onto the numbered charts,
    //     with hand-stated polynomial inverses certified first.
    let covers = atlas.cover_witnesses();
    let inverses: [[&str; 9]; 3] = [
        [
            "lambda", "0", "0", //
            "- lambda mu", "1", "0", //
            "lambda nu", "0", "1",
        ],
        [
            "0", "1", "0", //
            "sigma", "0", "0", //
            "- sigma tau", "0", "1",
        ],
        [
            "0", "1", "0", //
            "0", "0", "1", //
            "kappa", "0", "0",
        ],
    ];
    let eta = atlas.base_vector(BaseVector::Heisenberg);
    for (wit, inv) in covers.iter().zip(inverses) {
        let patch = chart_patch(wit, inv);
        let cancel = (patch.var_idx, patch.inv_idx);

        // g * ginv = I after reduction mod v * v_inv = 1
        let check = || -> Result<(), String> {
            for r in 0..3 {
                for c in 0..3 {
                    let mut acc = MultiPoly::zero(&patch.ext, &field);
                    for k in 0..3 {
                        acc = &acc + &(&patch.g[r * 3 + k] * &patch.ginv[k * 3 + c]);
                    }
                    acc = acc.cancel_inverse_pair(cancel.0, cancel.1);
                    let expect = if r == c {
                        MultiPoly::one(&patch.ext, &field)
                    } else {
                        MultiPoly::zero(&patch.ext, &field)
                    };
                    if acc != expect {
                        return Err(format!(
                            "product entry ({},{}) reduces to {} instead of {}",
                            r + 1,
                            c + 1,
                            acc,
                            expect
                        ));
                    }
                }
            }
            Ok(())
        };
        rep.record(
            format!("cover_{}_inverse", wit.label),
            format!(
                "the stated polynomial inverse of {} is exact modulo {} * {}_inv = 1",
                wit.label,
                patch.ext.name(cancel.0),
                patch.ext.name(cancel.0)
            ),
            check(),
        );

        // act(eta, g) = family(params) as reduced polynomials
        let acted = act_symbolic(&constant_vector(&eta, &patch.ext), &patch.g, &patch.ginv);
        let expect = family_images(&atlas, patch.family, &patch.ext);
        let mut outcome = Ok(());
        for r in 0..27 {
            let got = acted[r].cancel_inverse_pair(cancel.0, cancel.1);
            if got != expect[r] {
                outcome = Err(format!(
                    "coordinate {} moves to {} instead of {}",
                    r + 1,
                    got,
                    expect[r]
                ));
                break;
            }
        }
        rep.record(
            format!("cover_{}_patch", wit.label),
            format!(
                "acting on the two-step nilpotent base by {} lands exactly on the {} chart",
                wit.label,
                patch.family.id()
            ),
            outcome,
        );
    }

    // --- the Heisenberg master family is the affine master family at
    //     mirrored parameters: h_full(a,b,c,d) = a_full(a,b,c,c,b,a,d).
    {
        let hf = atlas.family(FamilyName::HeisenbergFull);
        let af = atlas.family(FamilyName::AffineFull);
        let ext = Arc::clone(hf.params());
        let var = |name: &str| MultiPoly::var(&ext, &field, ext.index_of(name).unwrap());
        let images = [
            var("alpha"),
            var("beta"),
            var("gamma"),
            var("gamma"),
            var("beta"),
            var("alpha"),
            var("delta"),
        ];
        let mut outcome = Ok(());
        for r in 1..=27 {
            let lhs = hf.component(r);
            let rhs = af.component(r).substitute(&ext, &images);
            if *lhs != rhs {
                outcome = Err(format!(
                    "component {r}: {lhs} vs substituted {rhs}"
                ));
                break;
            }
        }
        rep.record(
            "cover_h_full_inside_a_full",
            "the Heisenberg-type master family is the affine-type master family at mirrored parameters (a,b,c,c,b,a,d)",
            outcome,
        );
    }

    // --- system-on-family compositions: each closure system vanishes
    //     identically on its families, and the Lie conditions vanish on both
    //     master families.
    let compositions: [(&str, SystemName, FamilyName); 10] = [
        ("cover_h_sys_on_h_full", SystemName::HeisenbergSystem, FamilyName::HeisenbergFull),
        ("cover_h_sys_on_h1", SystemName::HeisenbergSystem, FamilyName::Heisenberg1),
        ("cover_h_sys_on_h2", SystemName::HeisenbergSystem, FamilyName::Heisenberg2),
        ("cover_h_sys_on_h3", SystemName::HeisenbergSystem, FamilyName::Heisenberg3),
        ("cover_a_sys_on_a_full", SystemName::AffineSystem, FamilyName::AffineFull),
        ("cover_a_sys_on_a1", SystemName::AffineSystem, FamilyName::Affine1),
        ("cover_a_sys_on_a2", SystemName::AffineSystem, FamilyName::Affine2),
        ("cover_a_sys_on_a3", SystemName::AffineSystem, FamilyName::Affine3),
        ("cover_jacobi_on_h_full", SystemName::Jacobi, FamilyName::HeisenbergFull),
        ("cover_jacobi_on_a_full", SystemName::Jacobi, FamilyName::AffineFull),
    ];
    for (id, sys, fam) in compositions {
        let ext = Arc::clone(atlas.family(fam).params());
        let images = family_images(&atlas, fam, &ext);
        rep.record(
            id,
            format!(
                "every generator of {} vanishes identically on the {} family",
                sys.id(),
                fam.id()
            ),
            compose_system(&atlas, sys, &ext, &images, None, true),
        );
    }

    // --- negative control: the open-set polynomials do NOT vanish on the
    //     affine master family (they cut the Heisenberg part out of it).
    {
        let ext = Arc::clone(atlas.family(FamilyName::AffineFull).params());
        let images = family_images(&atlas, FamilyName::AffineFull, &ext);
        rep.record(
            "cover_open_cut_survives_a_full",
            "none of the open-set polynomials vanish identically on the affine-type master family",
            compose_system(&atlas, SystemName::OpenSetCut, &ext, &images, None, false),
        );
    }

    // --- the three closure loci: rows without witnesses land inside the
    //     refined system's variety, symbolically on the solved locus.
    {
        // row 8: (a, b, c, pc/a, pb/a, p) with a formally inverted
        let names = ["alpha", "beta", "gamma", "phi", "alpha_inv"];
        let ext = VarTable::new(names.iter().copied()).unwrap();
        let p = |s: &str| MultiPoly::parse(&ext, &field, s).unwrap();
        let params = [
            p("alpha"),
            p("beta"),
            p("gamma"),
            p("phi gamma alpha_inv"),
            p("phi beta alpha_inv"),
            p("phi"),
        ];
        let fam = atlas.family(FamilyName::Affine1);
        let images: Vec<MultiPoly> = fam
            .components()
            .iter()
            .map(|c| c.substitute(&ext, &params))
            .collect();
        let cancel = Some((ext.index_of("alpha").unwrap(), ext.index_of("alpha_inv").unwrap()));
        rep.record(
            "cover_closure_row08",
            "on the locus a1*mu = phi*gamma, a1*nu = phi*beta (alpha nonzero) the a1 chart satisfies the refined system identically",
            compose_system(&atlas, SystemName::AffineSystemPlus, &ext, &images, cancel, true),
        );
    }
    {
        // row 12: (sigma, tau, rho, zeta) = (tz, t, 0, z)
        let ext = VarTable::new(["tau", "zeta"]).unwrap();
        let p = |s: &str| MultiPoly::parse(&ext, &field, s).unwrap();
        let params = [p("tau zeta"), p("tau"), p("0"), p("zeta")];
        let fam = atlas.family(FamilyName::Affine2);
        let images: Vec<MultiPoly> = fam
            .components()
            .iter()
            .map(|c| c.substitute(&ext, &params))
            .collect();
        rep.record(
            "cover_closure_row12",
            "on the locus rho = 0, sigma = tau*zeta the a2 chart satisfies the refined system identically",
            compose_system(&atlas, SystemName::AffineSystemPlus, &ext, &images, None, true),
        );
    }
    {
        // row 16: (theta, xi, kappa) = (t, 0, 0)
        let ext = VarTable::new(["theta"]).unwrap();
        let p = |s: &str| MultiPoly::parse(&ext, &field, s).unwrap();
        let params = [p("theta"), p("0"), p("0")];
        let fam = atlas.family(FamilyName::Affine3);
        let images: Vec<MultiPoly> = fam
            .components()
            .iter()
            .map(|c| c.substitute(&ext, &params))
            .collect();
        rep.record(
            "cover_closure_row16",
            "on the locus xi = kappa = 0 the a3 chart satisfies the refined system identically",
            compose_system(&atlas, SystemName::AffineSystemPlus, &ext, &images, None, true),
        );
    }

    rep.finalize();
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::Mutation;

    #[test]
    fn clean_cover_suite_passes() {
        let cfg = SuiteConfig::default();
        let rep = run(&cfg);
        assert_eq!(rep.claims.len(), 21);
        assert!(rep.passed(), "{}", rep.render_text());
    }

    #[test]
    fn cut_faults_break_the_cover_suite() {
        // a sign flip in a quadric generator, and one in a linear generator
        for mutation in [
            Mutation::CutSign { gen: 4, term: 0 },
            Mutation::CutSign { gen: 0, term: 1 },
        ] {
            let cfg = SuiteConfig {
                mutation: Some(mutation),
                ..SuiteConfig::default()
            };
            let rep = run(&cfg);
            assert!(!rep.passed(), "mutation {mutation} went unnoticed");
            let failing: Vec<&str> = rep
                .claims
                .iter()
                .filter(|c| c.status == super::super::report::Status::Fail)
                .map(|c| c.id.as_str())
                .collect();
            assert!(
                failing.iter().any(|id| id.starts_with("cover_h_sys_on")),
                "expected a composition failure, got {failing:?}"
            );
        }
    }

    #[test]
    fn row_faults_do_not_touch_the_cover_suite() {
        // witness-entry flips live in the table, which this suite never reads
        let cfg = SuiteConfig {
            mutation: Some(Mutation::RowEntrySign { row: 1, entry: 0 }),
            ..SuiteConfig::default()
        };
        assert!(run(&cfg).passed());
    }
}

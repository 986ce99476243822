//! Built-in catalogue for the n = 3 orbit-closure verification: base
//! structure vectors, parametric families of structure vectors, polynomial
//! systems cutting out the closures, and the witness matrices that move the
//! base points onto family instances.
//!
//! Component formulas are stored as plain-text polynomial tables (parsed by
//! [`MultiPoly::parse`]) so they can be audited against the displayed math at
//! a glance; tests reconstruct every family a second way, from its bracket
//! multipliers, and compare.  The two base brackets are
//!
//! * `Heisenberg`: [b2, b3] = b1 (two-step nilpotent + center), and
//! * `Affine`:     [b1, b2] = b1 (nonabelian 2-dimensional + abelian line).
//!
//! An [`Atlas`] may carry a single deliberate sign [`Mutation`], used by the
//! fault-injection tests and the hidden CLI flag to prove the verifier
//! actually fails on perturbed data.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::field::{FieldDescriptor, Scalar};
use crate::poly::{MultiPoly, VarTable};
use crate::structure::{index_of, PolySystem, SquareMatrix, StructureVector};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum AtlasError {
    #[error("family {family} takes {expected} parameters, got {got}")]
    Arity {
        family: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("parameters violate the condition: {0}")]
    ConditionViolated(String),
    #[error("denominator {0} vanishes at the given parameters")]
    DenominatorZero(String),
    #[error("invalid mutation: {0}")]
    InvalidMutation(String),
}

/// The distinguished structure vectors everything else revolves around.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaseVector {
    /// [b2, b3] = b1: nonzero coordinates r16 = 1, r22 = -1.
    Heisenberg,
    /// [b1, b2] = b1: nonzero coordinates r4 = 1, r10 = -1.
    Affine,
    Zero,
}

/// The eight parametric families.  `*Full` are the master parametrizations;
/// the numbered ones are the charts that cover them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyName {
    HeisenbergFull,
    Heisenberg1,
    Heisenberg2,
    Heisenberg3,
    AffineFull,
    Affine1,
    Affine2,
    Affine3,
}

impl FamilyName {
    pub const ALL: [FamilyName; 8] = [
        FamilyName::HeisenbergFull,
        FamilyName::Heisenberg1,
        FamilyName::Heisenberg2,
        FamilyName::Heisenberg3,
        FamilyName::AffineFull,
        FamilyName::Affine1,
        FamilyName::Affine2,
        FamilyName::Affine3,
    ];

    /// Short stable id used in claim names and CLI output.
    pub fn id(&self) -> &'static str {
        match self {
            FamilyName::HeisenbergFull => "h_full",
            FamilyName::Heisenberg1 => "h1",
            FamilyName::Heisenberg2 => "h2",
            FamilyName::Heisenberg3 => "h3",
            FamilyName::AffineFull => "a_full",
            FamilyName::Affine1 => "a1",
            FamilyName::Affine2 => "a2",
            FamilyName::Affine3 => "a3",
        }
    }

    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            FamilyName::HeisenbergFull => &["alpha", "beta", "gamma", "delta"],
            FamilyName::Heisenberg1 => &["mu", "nu", "lambda"],
            FamilyName::Heisenberg2 => &["tau", "sigma"],
            FamilyName::Heisenberg3 => &["kappa"],
            FamilyName::AffineFull => &[
                "chi1", "psi1", "omega1", "chi2", "psi2", "omega2", "delta",
            ],
            FamilyName::Affine1 => &["alpha", "beta", "gamma", "mu", "nu", "phi"],
            FamilyName::Affine2 => &["sigma", "tau", "rho", "zeta"],
            FamilyName::Affine3 => &["theta", "xi", "kappa"],
        }
    }
}

/// Nonzero coordinates of each family, as (1-based flat position, formula)
/// pairs.  Positions not listed are zero.
fn family_component_table(name: FamilyName) -> &'static [(usize, &'static str)] {
    match name {
        FamilyName::HeisenbergFull => &[
            (4, "alpha gamma delta"),
            (5, "- beta gamma delta"),
            (6, "gamma^2 delta"),
            (7, "alpha beta delta"),
            (8, "- beta^2 delta"),
            (9, "beta gamma delta"),
            (10, "- alpha gamma delta"),
            (11, "beta gamma delta"),
            (12, "- gamma^2 delta"),
            (16, "alpha^2 delta"),
            (17, "- alpha beta delta"),
            (18, "alpha gamma delta"),
            (19, "- alpha beta delta"),
            (20, "beta^2 delta"),
            (21, "- beta gamma delta"),
            (22, "- alpha^2 delta"),
            (23, "alpha beta delta"),
            (24, "- alpha gamma delta"),
        ],
        FamilyName::Heisenberg1 => &[
            (4, "nu lambda"),
            (5, "- mu nu lambda"),
            (6, "nu^2 lambda"),
            (7, "mu lambda"),
            (8, "- mu^2 lambda"),
            (9, "mu nu lambda"),
            (10, "- nu lambda"),
            (11, "mu nu lambda"),
            (12, "- nu^2 lambda"),
            (16, "lambda"),
            (17, "- mu lambda"),
            (18, "nu lambda"),
            (19, "- mu lambda"),
            (20, "mu^2 lambda"),
            (21, "- mu nu lambda"),
            (22, "- lambda"),
            (23, "mu lambda"),
            (24, "- nu lambda"),
        ],
        FamilyName::Heisenberg2 => &[
            (5, "sigma tau"),
            (6, "- sigma tau^2"),
            (8, "sigma"),
            (9, "- sigma tau"),
            (11, "- sigma tau"),
            (12, "sigma tau^2"),
            (20, "- sigma"),
            (21, "sigma tau"),
        ],
        FamilyName::Heisenberg3 => &[(6, "kappa"), (12, "- kappa")],
        FamilyName::AffineFull => &[
            (4, "chi1 chi2 delta"),
            (5, "- psi1 chi2 delta"),
            (6, "omega1 chi2 delta"),
            (7, "chi1 psi2 delta"),
            (8, "- psi1 psi2 delta"),
            (9, "omega1 psi2 delta"),
            (10, "- chi1 chi2 delta"),
            (11, "psi1 chi2 delta"),
            (12, "- omega1 chi2 delta"),
            (16, "chi1 omega2 delta"),
            (17, "- psi1 omega2 delta"),
            (18, "omega1 omega2 delta"),
            (19, "- chi1 psi2 delta"),
            (20, "psi1 psi2 delta"),
            (21, "- omega1 psi2 delta"),
            (22, "- chi1 omega2 delta"),
            (23, "psi1 omega2 delta"),
            (24, "- omega1 omega2 delta"),
        ],
        FamilyName::Affine1 => &[
            (4, "mu alpha"),
            (5, "- mu beta"),
            (6, "mu gamma"),
            (7, "nu alpha"),
            (8, "- nu beta"),
            (9, "nu gamma"),
            (10, "- mu alpha"),
            (11, "mu beta"),
            (12, "- mu gamma"),
            (16, "phi alpha"),
            (17, "- phi beta"),
            (18, "phi gamma"),
            (19, "- nu alpha"),
            (20, "nu beta"),
            (21, "- nu gamma"),
            (22, "- phi alpha"),
            (23, "phi beta"),
            (24, "- phi gamma"),
        ],
        FamilyName::Affine2 => &[
            (5, "sigma"),
            (6, "- sigma zeta"),
            (8, "tau"),
            (9, "- tau zeta"),
            (11, "- sigma"),
            (12, "sigma zeta"),
            (17, "rho"),
            (18, "- rho zeta"),
            (20, "- tau"),
            (21, "tau zeta"),
            (23, "- rho"),
            (24, "rho zeta"),
        ],
        FamilyName::Affine3 => &[
            (6, "theta"),
            (9, "xi"),
            (12, "- theta"),
            (18, "kappa"),
            (21, "- xi"),
            (24, "- kappa"),
        ],
    }
}

/// Extra generators cutting the Heisenberg-type closure out of the
/// antisymmetric chart: three linear relations and four quadrics.
const HEISENBERG_CUT: [&str; 7] = [
    "X121 - X233",
    "X131 + X232",
    "X122 + X133",
    "X122^2 + X123 X132",
    "X121^2 - X123 X231",
    "X131^2 + X132 X231",
    "X121 X131 + X122 X231",
];

/// The 2x2-minor quadrics cutting out the affine-type closure.
const AFFINE_QUADRICS: [&str; 9] = [
    "X121 X132 - X122 X131",
    "X121 X232 - X122 X231",
    "X131 X232 - X132 X231",
    "X121 X133 - X123 X131",
    "X121 X233 - X123 X231",
    "X232 X123 - X122 X233",
    "X122 X133 - X123 X132",
    "X132 X233 - X133 X232",
    "X233 X131 - X133 X231",
];

/// Polynomial systems over the 27 coordinate variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SystemName {
    /// X_iik for all i, k (9 generators).
    DiagonalZero,
    /// X_ijk + X_jik for all i, j, k (27 generators, duplicates kept).
    Antisymmetry,
    /// The seven extra Heisenberg-type generators.
    HeisenbergCut,
    /// DiagonalZero + Antisymmetry + HeisenbergCut (43).
    HeisenbergSystem,
    /// The nine affine-type quadrics.
    AffineQuadrics,
    /// DiagonalZero + Antisymmetry + AffineQuadrics (45).
    AffineSystem,
    /// The three linear generators of HeisenbergCut on their own; their
    /// nonvanishing locus is the open set where affine-type witnesses live.
    OpenSetCut,
    /// AffineSystem + OpenSetCut (48).
    AffineSystemPlus,
    /// AffineSystem + HeisenbergCut (52).
    AffineHeisenbergJoin,
    /// The full dimension-3 Lie conditions (117 generators).
    Jacobi,
}

impl SystemName {
    pub fn id(&self) -> &'static str {
        match self {
            SystemName::DiagonalZero => "diag_zero",
            SystemName::Antisymmetry => "antisym",
            SystemName::HeisenbergCut => "h_cut",
            SystemName::HeisenbergSystem => "h_sys",
            SystemName::AffineQuadrics => "a_quad",
            SystemName::AffineSystem => "a_sys",
            SystemName::OpenSetCut => "open_cut",
            SystemName::AffineSystemPlus => "a_sys_plus",
            SystemName::AffineHeisenbergJoin => "a_h_join",
            SystemName::Jacobi => "jacobi",
        }
    }
}

/// A parametric family of structure vectors: 27 coordinate polynomials over
/// the family's parameter table.
#[derive(Clone, Debug)]
pub struct ParamFamily {
    name: FamilyName,
    field: FieldDescriptor,
    params: Arc<VarTable>,
    components: Vec<MultiPoly>,
}

impl ParamFamily {
    pub fn name(&self) -> FamilyName {
        self.name
    }

    pub fn params(&self) -> &Arc<VarTable> {
        &self.params
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }

    /// Coordinate polynomial at 1-based flat position r.
    pub fn component(&self, r: usize) -> &MultiPoly {
        &self.components[r - 1]
    }

    /// All 27 coordinate polynomials in flat order.
    pub fn components(&self) -> &[MultiPoly] {
        &self.components
    }

    pub fn eval(&self, values: &[Scalar]) -> Result<StructureVector, AtlasError> {
        if values.len() != self.arity() {
            return Err(AtlasError::Arity {
                family: self.name.id(),
                expected: self.arity(),
                got: values.len(),
            });
        }
        let coords = self.components.iter().map(|c| c.eval(values)).collect();
        Ok(StructureVector::from_coords(3, &self.field, coords).unwrap())
    }
}

/// One conjunct of a parameter-space condition: a polynomial required to be
/// zero or nonzero.
#[derive(Clone, Debug)]
pub struct PredAtom {
    pub poly: MultiPoly,
    pub expect_zero: bool,
}

/// A conjunction of polynomial (non)vanishing conditions on parameters.
#[derive(Clone, Debug, Default)]
pub struct Predicate {
    atoms: Vec<PredAtom>,
}

impl Predicate {
    pub fn new(atoms: Vec<PredAtom>) -> Predicate {
        Predicate { atoms }
    }

    pub fn atoms(&self) -> &[PredAtom] {
        &self.atoms
    }

    pub fn holds(&self, values: &[Scalar]) -> bool {
        self.atoms
            .iter()
            .all(|a| a.poly.eval(values).is_zero() == a.expect_zero)
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "always");
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, " and ")?;
            }
            write!(f, "{} {} 0", a.poly, if a.expect_zero { "=" } else { "!=" })?;
        }
        Ok(())
    }
}

/// A quotient of two parameter polynomials; denominators are guaranteed
/// nonzero wherever the owning witness's condition holds.
#[derive(Clone, Debug)]
pub struct RationalExpr {
    pub num: MultiPoly,
    pub den: MultiPoly,
}

impl RationalExpr {
    fn whole(num: MultiPoly) -> RationalExpr {
        let den = MultiPoly::one(num.table(), num.field());
        RationalExpr { num, den }
    }

    pub fn eval(&self, values: &[Scalar]) -> Result<Scalar, AtlasError> {
        let d = self.den.eval(values);
        let dinv = d
            .inv()
            .map_err(|_| AtlasError::DenominatorZero(self.den.to_string()))?;
        Ok(&self.num.eval(values) * &dinv)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl fmt::Display for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_zero() || self.den == MultiPoly::one(self.den.table(), self.den.field()) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// A parametric transition matrix certified to carry `base` onto `target` at
/// every parameter point satisfying `condition`, together with its stored
/// determinant formula.
#[derive(Clone, Debug)]
pub struct WitnessMatrix {
    pub label: String,
    pub base: BaseVector,
    pub target: FamilyName,
    pub params: Arc<VarTable>,
    pub condition: Predicate,
    /// Row-major 3x3 entry formulas.
    pub entries: Vec<RationalExpr>,
    pub det: RationalExpr,
}

impl WitnessMatrix {
    /// Evaluates the matrix and its determinant formula at a parameter point;
    /// the point must satisfy the condition.
    pub fn instantiate(&self, values: &[Scalar]) -> Result<(SquareMatrix, Scalar), AtlasError> {
        if !self.condition.holds(values) {
            return Err(AtlasError::ConditionViolated(format!(
                "{} requires {}",
                self.label, self.condition
            )));
        }
        let entries = self
            .entries
            .iter()
            .map(|e| e.eval(values))
            .collect::<Result<Vec<_>, _>>()?;
        let rows = entries.chunks(3).map(|c| c.to_vec()).collect();
        Ok((SquareMatrix::from_rows(rows).unwrap(), self.det.eval(values)?))
    }
}

/// Outcome column of the sixteen-row classification table.
#[derive(Clone, Debug)]
pub enum RowOutcome {
    /// A transition matrix carries the affine base vector onto this instance.
    Witness(WitnessMatrix),
    /// No witness exists; instead the instance lies in the Heisenberg-type
    /// closure, i.e. vanishes on every AffineSystemPlus generator.
    InClosure,
}

/// One row of the classification table: which chart, under which parameter
/// condition, with which outcome.
#[derive(Clone, Debug)]
pub struct TableRow {
    pub index: usize,
    pub family: FamilyName,
    pub condition: Predicate,
    pub outcome: RowOutcome,
}

impl TableRow {
    pub fn label(&self) -> String {
        format!("row{:02}", self.index)
    }

    pub fn is_witness(&self) -> bool {
        matches!(self.outcome, RowOutcome::Witness(_))
    }
}

/// A single deliberate sign error, for fault-injection testing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Negate term `term` (in canonical term order) of HeisenbergCut
    /// generator `gen`; propagates into every system containing those
    /// generators.
    CutSign { gen: usize, term: usize },
    /// Negate the numerator of entry `entry` (row-major, 0..9) of the witness
    /// matrix in table row `row` (1-based).
    RowEntrySign { row: usize, entry: usize },
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mutation::CutSign { gen, term } => write!(f, "cut:{gen}:{term}"),
            Mutation::RowEntrySign { row, entry } => write!(f, "row:{row}:{entry}"),
        }
    }
}

impl std::str::FromStr for Mutation {
    type Err = String;

    /// Inverse of [`Display`](fmt::Display): `cut:GEN:TERM` or `row:ROW:ENTRY`.
    fn from_str(s: &str) -> Result<Mutation, String> {
        let err = || format!("expected cut:GEN:TERM or row:ROW:ENTRY, got {s:?}");
        let mut parts = s.split(':');
        let kind = parts.next().ok_or_else(err)?;
        let a: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(err)?;
        let b: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(err)?;
        if parts.next().is_some() {
            return Err(err());
        }
        match kind {
            "cut" => Ok(Mutation::CutSign { gen: a, term: b }),
            "row" => Ok(Mutation::RowEntrySign { row: a, entry: b }),
            _ => Err(err()),
        }
    }
}

/// Catalogue handle: a coefficient field plus an optional injected fault.
#[derive(Clone, Debug)]
pub struct Atlas {
    field: FieldDescriptor,
    mutation: Option<Mutation>,
}

impl Atlas {
    pub fn new(field: FieldDescriptor) -> Atlas {
        Atlas {
            field,
            mutation: None,
        }
    }

    /// An atlas with one sign fault injected; rejects mutations that do not
    /// address a stored nonzero term or entry.
    pub fn with_mutation(field: FieldDescriptor, mutation: Mutation) -> Result<Atlas, AtlasError> {
        let clean = Atlas::new(field);
        if !clean.mutation_universe().contains(&mutation) {
            return Err(AtlasError::InvalidMutation(format!(
                "{mutation} does not address a stored nonzero term or entry"
            )));
        }
        Ok(Atlas {
            field,
            mutation: Some(mutation),
        })
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn mutation(&self) -> Option<Mutation> {
        self.mutation
    }

    pub fn base_vector(&self, which: BaseVector) -> StructureVector {
        let mut v = StructureVector::zero(3, &self.field);
        let one = Scalar::one(&self.field);
        let minus = Scalar::from_int(&self.field, -1);
        match which {
            BaseVector::Heisenberg => {
                v.set(2, 3, 1, one);
                v.set(3, 2, 1, minus);
            }
            BaseVector::Affine => {
                v.set(1, 2, 1, one);
                v.set(2, 1, 1, minus);
            }
            BaseVector::Zero => {}
        }
        v
    }

    pub fn family(&self, name: FamilyName) -> ParamFamily {
        let params = VarTable::new(name.param_names().iter().copied()).unwrap();
        let mut components = vec![MultiPoly::zero(&params, &self.field); 27];
        for &(r, src) in family_component_table(name) {
            components[r - 1] = MultiPoly::parse(&params, &self.field, src).unwrap();
        }
        ParamFamily {
            name,
            field: self.field,
            params,
            components,
        }
    }

    fn coordinate_monomials(&self, table: &Arc<VarTable>) -> Vec<MultiPoly> {
        (0..27)
            .map(|i| MultiPoly::var(table, &self.field, i))
            .collect()
    }

    fn heisenberg_cut_gens(&self, table: &Arc<VarTable>) -> Vec<MultiPoly> {
        let mut gens: Vec<MultiPoly> = HEISENBERG_CUT
            .iter()
            .map(|src| MultiPoly::parse(table, &self.field, src).unwrap())
            .collect();
        if let Some(Mutation::CutSign { gen, term }) = self.mutation {
            gens[gen] = flip_term_sign(&gens[gen], term);
        }
        gens
    }

    pub fn system(&self, name: SystemName) -> PolySystem {
        let table = crate::structure::coordinate_table(3);
        let build = |gens: Vec<MultiPoly>| PolySystem::new(name.id(), Arc::clone(&table), gens);
        match name {
            SystemName::DiagonalZero => {
                let mut gens = Vec::new();
                for i in 1..=3 {
                    for k in 1..=3 {
                        let idx = index_of(3, i, i, k).unwrap() - 1;
                        gens.push(MultiPoly::var(&table, &self.field, idx));
                    }
                }
                build(gens)
            }
            SystemName::Antisymmetry => {
                let vars = self.coordinate_monomials(&table);
                let mut gens = Vec::new();
                for i in 1..=3 {
                    for j in 1..=3 {
                        for k in 1..=3 {
                            let a = &vars[index_of(3, i, j, k).unwrap() - 1];
                            let b = &vars[index_of(3, j, i, k).unwrap() - 1];
                            gens.push(a + b);
                        }
                    }
                }
                build(gens)
            }
            SystemName::HeisenbergCut => build(self.heisenberg_cut_gens(&table)),
            SystemName::OpenSetCut => build(self.heisenberg_cut_gens(&table)[..3].to_vec()),
            SystemName::HeisenbergSystem => self
                .system(SystemName::DiagonalZero)
                .join("", &self.system(SystemName::Antisymmetry))
                .join(name.id(), &self.system(SystemName::HeisenbergCut)),
            SystemName::AffineQuadrics => build(
                AFFINE_QUADRICS
                    .iter()
                    .map(|src| MultiPoly::parse(&table, &self.field, src).unwrap())
                    .collect(),
            ),
            SystemName::AffineSystem => self
                .system(SystemName::DiagonalZero)
                .join("", &self.system(SystemName::Antisymmetry))
                .join(name.id(), &self.system(SystemName::AffineQuadrics)),
            SystemName::AffineSystemPlus => self
                .system(SystemName::AffineSystem)
                .join(name.id(), &self.system(SystemName::OpenSetCut)),
            SystemName::AffineHeisenbergJoin => self
                .system(SystemName::AffineSystem)
                .join(name.id(), &self.system(SystemName::HeisenbergCut)),
            SystemName::Jacobi => crate::structure::jacobi_generators(3, &self.field),
        }
    }

    /// The three cover witnesses onto the numbered Heisenberg charts.
    pub fn cover_witnesses(&self) -> Vec<WitnessMatrix> {
        let f = &self.field;
        let h1 = FamilyName::Heisenberg1;
        let t1 = VarTable::new(h1.param_names().iter().copied()).unwrap();
        let p1 = |s: &str| MultiPoly::parse(&t1, f, s).unwrap();
        let g1 = WitnessMatrix {
            label: "g1".into(),
            base: BaseVector::Heisenberg,
            target: h1,
            params: Arc::clone(&t1),
            condition: Predicate::new(vec![nonzero(p1("lambda"))]),
            entries: vec![
                RationalExpr { num: p1("1"), den: p1("lambda") },
                RationalExpr::whole(p1("0")),
                RationalExpr::whole(p1("0")),
                RationalExpr::whole(p1("mu")),
                RationalExpr::whole(p1("1")),
                RationalExpr::whole(p1("0")),
                RationalExpr::whole(p1("- nu")),
                RationalExpr::whole(p1("0")),
                RationalExpr::whole(p1("1")),
            ],
            det: RationalExpr { num: p1("1"), den: p1("lambda") },
        };
        let h2 = FamilyName::Heisenberg2;
        let t2 = VarTable::new(h2.param_names().iter().copied()).unwrap();
        let p2 = |s: &str| MultiPoly::parse(&t2, f, s).unwrap();
        let g2 = WitnessMatrix {
            label: "g2".into(),
            base: BaseVector::Heisenberg,
            target: h2,
            params: Arc::clone(&t2),
            condition: Predicate::new(vec![nonzero(p2("sigma"))]),
            entries: vec![
                RationalExpr::whole(p2("0")),
                RationalExpr { num: p2("1"), den: p2("sigma") },
                RationalExpr::whole(p2("0")),
                RationalExpr::whole(p2("1")),
                RationalExpr::whole(p2("0")),
                RationalExpr::whole(p2("0")),
                RationalExpr::whole(p2("0")),
                RationalExpr::whole(p2("tau")),
                RationalExpr::whole(p2("1")),
            ],
            det: RationalExpr { num: p2("- 1"), den: p2("sigma") },
        };
        let h3 = FamilyName::Heisenberg3;
        let t3 = VarTable::new(h3.param_names().iter().copied()).unwrap();
        let p3 = |s: &str| MultiPoly::parse(&t3, f, s).unwrap();
        let g3 = WitnessMatrix {
            label: "g3".into(),
            base: BaseVector::Heisenberg,
            target: h3,
            params: Arc::clone(&t3),
            condition: Predicate::new(vec![nonzero(p3("kappa"))]),
            entries: vec![
                RationalExpr::whole(p3("0")),
                RationalExpr::whole(p3("0")),
                RationalExpr { num: p3("1"), den: p3("kappa") },
                RationalExpr::whole(p3("1")),
                RationalExpr::whole(p3("0")),
                RationalExpr::whole(p3("0")),
                RationalExpr::whole(p3("0")),
                RationalExpr::whole(p3("1")),
                RationalExpr::whole(p3("0")),
            ],
            det: RationalExpr { num: p3("1"), den: p3("kappa") },
        };
        vec![g1, g2, g3]
    }

    /// The sixteen-row classification table for affine-chart instances.
    pub fn table(&self) -> Vec<TableRow> {
        let f = &self.field;
        let mut rows = Vec::with_capacity(16);

        // --- Affine1 chart, parameters (alpha, beta, gamma, mu, nu, phi),
        //     always restricted to alpha != 0.
        let fam1 = FamilyName::Affine1;
        let t1 = VarTable::new(fam1.param_names().iter().copied()).unwrap();
        let p = |s: &str| MultiPoly::parse(&t1, f, s).unwrap();
        let a1 = p("mu alpha - phi gamma");
        let a2 = p("nu alpha - phi beta");
        let alpha_nz = nonzero(p("alpha"));

        let mut push1 = |idx: usize,
                         extra: Vec<PredAtom>,
                         outcome: Option<(Vec<RationalExpr>, RationalExpr)>| {
            let mut atoms = vec![alpha_nz.clone()];
            atoms.extend(extra);
            let condition = Predicate::new(atoms);
            let outcome = match outcome {
                Some((entries, det)) => RowOutcome::Witness(self.finish_witness(
                    idx,
                    BaseVector::Affine,
                    fam1,
                    &t1,
                    &condition,
                    entries,
                    det,
                )),
                None => RowOutcome::InClosure,
            };
            rows.push(TableRow {
                index: idx,
                family: fam1,
                condition,
                outcome,
            });
        };

        let w = RationalExpr::whole;
        push1(
            1,
            vec![nonzero(a1.clone()), nonzero(a2.clone())],
            Some((
                vec![
                    w(p("nu")), w(p("phi")), w(p("0")),
                    w(p("mu beta - nu gamma")), w(a1.clone()), w(a2.clone()),
                    w(p("- gamma")), w(p("0")), w(p("alpha")),
                ],
                w(&a1 * &a2),
            )),
        );
        push1(
            2,
            vec![
                zero(a1.clone()),
                nonzero(a2.clone()),
                nonzero(p("phi")),
                nonzero(p("gamma")),
            ],
            Some((
                vec![
                    w(p("beta")), w(p("alpha")),
                    RationalExpr { num: &p("alpha") * &a2, den: p("phi gamma") },
                    RationalExpr { num: -&(&p("gamma") * &a2), den: p("alpha") },
                    w(p("0")), w(a2.clone()),
                    RationalExpr { num: p("phi beta"), den: p("alpha") },
                    w(p("phi")), w(p("0")),
                ],
                w(-&(&a2 * &a2)),
            )),
        );
        push1(
            3,
            vec![zero(a1.clone()), nonzero(a2.clone()), zero(p("phi"))],
            Some((
                vec![
                    w(p("1")), w(p("0")), w(p("0")),
                    w(p("- gamma nu")), w(p("0")), w(p("alpha nu")),
                    w(p("- gamma + beta")), w(p("alpha")), w(p("alpha")),
                ],
                w(p("- alpha^2 nu")),
            )),
        );
        push1(
            4,
            vec![
                zero(a1.clone()),
                nonzero(a2.clone()),
                nonzero(p("phi")),
                zero(p("gamma")),
            ],
            Some((
                vec![
                    w(p("nu")), w(p("phi")), w(p("0")),
                    w(p("0")), w(p("0")), w(a2.clone()),
                    w(p("beta")), w(p("alpha")), w(p("0")),
                ],
                w(-&(&a2 * &a2)),
            )),
        );
        push1(
            5,
            vec![
                nonzero(a1.clone()),
                zero(a2.clone()),
                nonzero(p("beta")),
                nonzero(p("gamma")),
            ],
            Some((
                vec![
                    w(p("0")), w(p("alpha^2 mu gamma")), w(p("alpha gamma phi beta")),
                    RationalExpr { num: &p("beta") * &a1, den: p("alpha") },
                    w(a1.clone()), w(p("0")),
                    RationalExpr { num: -&a1, den: p("alpha") },
                    w(p("0")),
                    RationalExpr { num: a1.clone(), den: p("gamma") },
                ],
                w(-&(&p("beta") * &a1.pow(3))),
            )),
        );
        push1(
            6,
            vec![nonzero(a1.clone()), zero(a2.clone()), zero(p("gamma"))],
            Some((
                vec![
                    w(p("- mu")), w(p("0")), w(p("phi")),
                    w(p("beta mu")), w(p("mu alpha")), w(p("0")),
                    w(p("beta")), w(p("alpha")), w(p("1")),
                ],
                w(p("- mu^2 alpha")),
            )),
        );
        push1(
            7,
            vec![nonzero(a1.clone()), zero(a2.clone()), zero(p("beta"))],
            Some((
                vec![
                    w(p("mu")), w(p("0")), w(p("- phi")),
                    w(p("0")), w(a1.clone()), w(p("0")),
                    w(p("- gamma")), w(p("0")), w(p("alpha")),
                ],
                w(&a1 * &a1),
            )),
        );
        push1(8, vec![zero(a1.clone()), zero(a2.clone())], None);

        // --- Affine2 chart, parameters (sigma, tau, rho, zeta).
        let fam2 = FamilyName::Affine2;
        let t2 = VarTable::new(fam2.param_names().iter().copied()).unwrap();
        let p = |s: &str| MultiPoly::parse(&t2, f, s).unwrap();
        let tz = p("tau zeta - sigma");
        let w = RationalExpr::whole;

        let mut push2 = |idx: usize,
                         atoms: Vec<PredAtom>,
                         outcome: Option<(Vec<RationalExpr>, RationalExpr)>| {
            let condition = Predicate::new(atoms);
            let outcome = match outcome {
                Some((entries, det)) => RowOutcome::Witness(self.finish_witness(
                    idx,
                    BaseVector::Affine,
                    fam2,
                    &t2,
                    &condition,
                    entries,
                    det,
                )),
                None => RowOutcome::InClosure,
            };
            rows.push(TableRow {
                index: idx,
                family: fam2,
                condition,
                outcome,
            });
        };

        push2(
            9,
            vec![nonzero(p("rho")), nonzero(tz.clone())],
            Some((
                vec![
                    w(p("0")), w(p("- sigma")), w(p("- tau")),
                    w(tz.clone()), w(p("rho zeta")), w(p("rho")),
                    w(p("1")), w(p("0")), w(p("0")),
                ],
                w(&p("rho") * &tz),
            )),
        );
        push2(
            10,
            vec![nonzero(p("rho")), zero(tz.clone())],
            Some((
                vec![
                    w(p("tau")), w(p("rho")), w(p("0")),
                    w(p("0")), w(p("rho zeta")), w(p("rho")),
                    w(p("1")), w(p("0")), w(p("0")),
                ],
                w(p("rho^2")),
            )),
        );
        push2(
            11,
            vec![zero(p("rho")), nonzero(tz.clone())],
            Some((
                vec![
                    w(p("0")), w(p("sigma")), w(p("tau")),
                    w(tz.clone()), w(p("0")), w(p("0")),
                    w(p("0")), w(p("zeta")), w(p("1")),
                ],
                w(&tz * &tz),
            )),
        );
        push2(12, vec![zero(p("rho")), zero(tz.clone())], None);

        // --- Affine3 chart, parameters (theta, xi, kappa).
        let fam3 = FamilyName::Affine3;
        let t3 = VarTable::new(fam3.param_names().iter().copied()).unwrap();
        let p = |s: &str| MultiPoly::parse(&t3, f, s).unwrap();
        let w = RationalExpr::whole;

        let mut push3 = |idx: usize,
                         atoms: Vec<PredAtom>,
                         outcome: Option<(Vec<RationalExpr>, RationalExpr)>| {
            let condition = Predicate::new(atoms);
            let outcome = match outcome {
                Some((entries, det)) => RowOutcome::Witness(self.finish_witness(
                    idx,
                    BaseVector::Affine,
                    fam3,
                    &t3,
                    &condition,
                    entries,
                    det,
                )),
                None => RowOutcome::InClosure,
            };
            rows.push(TableRow {
                index: idx,
                family: fam3,
                condition,
                outcome,
            });
        };

        push3(
            13,
            vec![nonzero(p("kappa")), nonzero(p("xi"))],
            Some((
                vec![
                    w(p("1")),
                    RationalExpr { num: p("kappa + theta"), den: p("xi") },
                    w(p("1")),
                    w(p("- xi")), w(p("- kappa")), w(p("0")),
                    w(p("1")), w(p("0")), w(p("0")),
                ],
                w(p("kappa")),
            )),
        );
        push3(
            14,
            vec![nonzero(p("kappa")), zero(p("xi"))],
            Some((
                vec![
                    RationalExpr { num: p("- theta"), den: p("kappa") },
                    w(p("0")), w(p("1")),
                    w(p("0")), w(p("- kappa")), w(p("0")),
                    w(p("1")), w(p("0")), w(p("0")),
                ],
                w(p("kappa")),
            )),
        );
        push3(
            15,
            vec![zero(p("kappa")), nonzero(p("xi"))],
            Some((
                vec![
                    w(p("0")),
                    RationalExpr { num: p("theta"), den: p("xi") },
                    w(p("1")),
                    w(p("- xi")), w(p("0")), w(p("0")),
                    w(p("0")), w(p("1")), w(p("0")),
                ],
                w(p("- xi")),
            )),
        );
        push3(16, vec![zero(p("kappa")), zero(p("xi"))], None);

        rows
    }

    #[allow(clippy::too_many_arguments)]
    fn finish_witness(
        &self,
        row_index: usize,
        base: BaseVector,
        target: FamilyName,
        params: &Arc<VarTable>,
        condition: &Predicate,
        mut entries: Vec<RationalExpr>,
        det: RationalExpr,
    ) -> WitnessMatrix {
        if let Some(Mutation::RowEntrySign { row, entry }) = self.mutation {
            if row == row_index {
                entries[entry].num = -&entries[entry].num;
            }
        }
        WitnessMatrix {
            label: format!("row{row_index:02}"),
            base,
            target,
            params: Arc::clone(params),
            condition: condition.clone(),
            entries,
            det,
        }
    }

    pub fn table_row(&self, index: usize) -> TableRow {
        self.table()
            .into_iter()
            .find(|r| r.index == index)
            .expect("row index in 1..=16")
    }

    /// Every admissible single mutation, computed from the clean data:
    /// one per stored term of the seven cut generators, one per nonzero
    /// witness-matrix entry.
    pub fn mutation_universe(&self) -> Vec<Mutation> {
        let clean = Atlas::new(self.field);
        let table = crate::structure::coordinate_table(3);
        let mut out = Vec::new();
        for (gen, poly) in clean.heisenberg_cut_gens(&table).iter().enumerate() {
            for term in 0..poly.num_terms() {
                out.push(Mutation::CutSign { gen, term });
            }
        }
        for row in clean.table() {
            if let RowOutcome::Witness(wm) = &row.outcome {
                for (entry, e) in wm.entries.iter().enumerate() {
                    if !e.is_zero() {
                        out.push(Mutation::RowEntrySign {
                            row: row.index,
                            entry,
                        });
                    }
                }
            }
        }
        out
    }
}

fn nonzero(poly: MultiPoly) -> PredAtom {
    PredAtom {
        poly,
        expect_zero: false,
    }
}

fn zero(poly: MultiPoly) -> PredAtom {
    PredAtom {
        poly,
        expect_zero: true,
    }
}

fn flip_term_sign(poly: &MultiPoly, term: usize) -> MultiPoly {
    let terms: Vec<(Vec<u32>, Scalar)> = poly
        .terms()
        .enumerate()
        .map(|(i, (e, c))| (e.to_vec(), if i == term { -c } else { c.clone() }))
        .collect();
    MultiPoly::from_terms(poly.table(), poly.field(), terms).unwrap()
}

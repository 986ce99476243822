//! Exact finite sets of structure vectors over a prime field, with the
//! enumeration routes the `sets` suite compares against each other:
//! variety sweeps over the reduced antisymmetric chart, full GL-orbits, and
//! parameter-space family sweeps.

use std::collections::BTreeSet;

use crate::atlas::{ParamFamily, Predicate};
use crate::field::{FieldDescriptor, Scalar};
use crate::structure::{lift3, orbit, PolySystem, ReducedVector3, StructureError, StructureVector};

/// A set of full 27-coordinate points over F_p, stored canonically so that
/// sets built along different routes compare exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    field: FieldDescriptor,
    points: BTreeSet<Vec<u64>>,
}

fn raw_coords(v: &StructureVector) -> Vec<u64> {
    v.coords()
        .iter()
        .map(|c| match c {
            Scalar::Mod { value, .. } => *value,
            Scalar::Rational(_) => panic!("point sets are prime-field only"),
        })
        .collect()
}

/// Renders a point the same way structure vectors render: nonzero flat
/// coordinates as `r=value` pairs.
pub fn format_point(point: &[u64]) -> String {
    let parts: Vec<String> = point
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0)
        .map(|(z, v)| format!("r{}={}", z + 1, v))
        .collect();
    if parts.is_empty() {
        "[0]".into()
    } else {
        format!("[{}]", parts.join(", "))
    }
}

impl PointSet {
    pub fn empty(field: &FieldDescriptor) -> PointSet {
        assert!(field.is_prime_field(), "point sets are prime-field only");
        PointSet {
            field: *field,
            points: BTreeSet::new(),
        }
    }

    /// The one-point set {0}.
    pub fn zero_only(field: &FieldDescriptor) -> PointSet {
        let mut s = PointSet::empty(field);
        s.points.insert(vec![0; 27]);
        s
    }

    pub fn insert(&mut self, v: &StructureVector) {
        assert!(v.field() == &self.field);
        self.points.insert(raw_coords(v));
    }

    pub fn from_vectors<'a, I>(field: &FieldDescriptor, vectors: I) -> PointSet
    where
        I: IntoIterator<Item = &'a StructureVector>,
    {
        let mut s = PointSet::empty(field);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    /// One sweep over all p^9 points of the reduced antisymmetric chart,
    /// returning for each given system the set of lifted points where it
    /// vanishes.  The sweep size is checked against `budget`.
    pub fn enumerate_varieties(
        systems: &[&PolySystem],
        field: &FieldDescriptor,
        budget: u64,
    ) -> Result<Vec<PointSet>, StructureError> {
        let p = field
            .modulus()
            .ok_or(StructureError::NotPrimeField(*field))?;
        let needed = p
            .checked_pow(9)
            .ok_or(StructureError::BudgetExceeded {
                needed: u64::MAX,
                budget,
            })?;
        if needed > budget {
            return Err(StructureError::BudgetExceeded { needed, budget });
        }
        let mut out = vec![PointSet::empty(field); systems.len()];
        for code in 0..needed {
            let mut c = code;
            let coords: Vec<Scalar> = (0..9)
                .map(|_| {
                    let v = Scalar::from_int(field, (c % p) as i64);
                    c /= p;
                    v
                })
                .collect();
            let v = lift3(&ReducedVector3::from_coords(field, coords)?);
            for (sys, set) in systems.iter().zip(out.iter_mut()) {
                if sys.vanishes_at(v.coords()) {
                    set.insert(&v);
                }
            }
        }
        Ok(out)
    }

    /// The full GL(3, p) orbit of `v` as a point set.
    pub fn from_orbit(v: &StructureVector, budget: u64) -> Result<PointSet, StructureError> {
        let pts = orbit(v, budget)?;
        Ok(PointSet::from_vectors(v.field(), pts.iter()))
    }

    /// The image of a family over all parameter tuples in F_p^arity, or only
    /// those satisfying `restrict`.
    pub fn from_family_sweep(
        family: &ParamFamily,
        field: &FieldDescriptor,
        restrict: Option<&Predicate>,
    ) -> Result<PointSet, StructureError> {
        let p = field
            .modulus()
            .ok_or(StructureError::NotPrimeField(*field))?;
        let arity = family.arity() as u32;
        let mut out = PointSet::empty(field);
        for code in 0..p.pow(arity) {
            let mut c = code;
            let vals: Vec<Scalar> = (0..arity)
                .map(|_| {
                    let v = Scalar::from_int(field, (c % p) as i64);
                    c /= p;
                    v
                })
                .collect();
            if let Some(pred) = restrict {
                if !pred.holds(&vals) {
                    continue;
                }
            }
            out.insert(&family.eval(&vals).expect("arity checked"));
        }
        Ok(out)
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, v: &StructureVector) -> bool {
        self.points.contains(&raw_coords(v))
    }

    /// Reconstructs every point as a structure vector.
    pub fn vectors(&self) -> Vec<StructureVector> {
        self.points
            .iter()
            .map(|pt| {
                let coords = pt
                    .iter()
                    .map(|&v| Scalar::from_int(&self.field, v as i64))
                    .collect();
                StructureVector::from_coords(3, &self.field, coords).unwrap()
            })
            .collect()
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        assert!(self.field == other.field);
        PointSet {
            field: self.field,
            points: self.points.union(&other.points).cloned().collect(),
        }
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        assert!(self.field == other.field);
        PointSet {
            field: self.field,
            points: self.points.difference(&other.points).cloned().collect(),
        }
    }

    /// Splits into (points where `sys` vanishes, points where it does not).
    pub fn split_by(&self, sys: &PolySystem) -> (PointSet, PointSet) {
        let mut vanish = PointSet::empty(&self.field);
        let mut rest = PointSet::empty(&self.field);
        for v in self.vectors() {
            if sys.vanishes_at(v.coords()) {
                vanish.insert(&v);
            } else {
                rest.insert(&v);
            }
        }
        (vanish, rest)
    }

    /// Equality with a counterexample from the symmetric difference.
    pub fn assert_equal(
        &self,
        self_name: &str,
        other: &PointSet,
        other_name: &str,
    ) -> Result<(), String> {
        assert!(self.field == other.field);
        if self.points == other.points {
            return Ok(());
        }
        if let Some(pt) = self.points.difference(&other.points).next() {
            return Err(format!(
                "{} ({} points) vs {} ({} points): {} lies only in {}",
                self_name,
                self.len(),
                other_name,
                other.len(),
                format_point(pt),
                self_name
            ));
        }
        let pt = other.points.difference(&self.points).next().unwrap();
        Err(format!(
            "{} ({} points) vs {} ({} points): {} lies only in {}",
            self_name,
            self.len(),
            other_name,
            other.len(),
            format_point(pt),
            other_name
        ))
    }

    /// Checks a pointwise property, reporting the first offending point.
    pub fn check_all<F>(&self, description: &str, mut pred: F) -> Result<(), String>
    where
        F: FnMut(&StructureVector) -> bool,
    {
        for v in self.vectors() {
            if !pred(&v) {
                return Err(format!("{description} fails at {v}"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::{Atlas, BaseVector, SystemName};

    fn fp(p: u64) -> FieldDescriptor {
        FieldDescriptor::prime(p).unwrap()
    }

    #[test]
    fn variety_orbit_and_family_routes_agree_over_f2() {
        let f = fp(2);
        let atlas = Atlas::new(f);
        let s = atlas.system(SystemName::HeisenbergSystem);
        let via_sweep = &PointSet::enumerate_varieties(&[&s], &f, 1 << 20).unwrap()[0];
        assert_eq!(via_sweep.len(), 8); // frozen: p^3

        let eta = atlas.base_vector(BaseVector::Heisenberg);
        let via_orbit = PointSet::from_orbit(&eta, 1 << 20)
            .unwrap()
            .union(&PointSet::zero_only(&f));
        via_sweep.assert_equal("V(S)", &via_orbit, "orbit+0").unwrap();

        let via_family =
            PointSet::from_family_sweep(&atlas.family(crate::atlas::FamilyName::HeisenbergFull), &f, None)
                .unwrap();
        via_sweep.assert_equal("V(S)", &via_family, "image").unwrap();
    }

    #[test]
    fn set_operations_and_counterexamples() {
        let f = fp(2);
        let atlas = Atlas::new(f);
        let eta = atlas.base_vector(BaseVector::Heisenberg);
        let orb = PointSet::from_orbit(&eta, 1 << 20).unwrap();
        assert_eq!(orb.len(), 7); // frozen orbit size
        assert!(orb.contains(&eta));
        let with_zero = orb.union(&PointSet::zero_only(&f));
        assert_eq!(with_zero.len(), 8);
        assert_eq!(with_zero.difference(&orb).len(), 1);

        let err = orb
            .assert_equal("orbit", &with_zero, "orbit+0")
            .unwrap_err();
        assert!(err.contains("[0]"), "{err}");
        assert!(err.contains("only in orbit+0"), "{err}");

        // splitting V(T) by the open-set polynomials separates the orbits
        let t = atlas.system(SystemName::AffineSystem);
        let vt = &PointSet::enumerate_varieties(&[&t], &f, 1 << 20).unwrap()[0];
        let (in_cut, off_cut) = vt.split_by(&atlas.system(SystemName::OpenSetCut));
        assert_eq!(vt.len(), 50); // frozen: 42 + 7 + 1
        assert_eq!(off_cut.len(), 42);
        assert_eq!(in_cut.len(), 8);
    }

    #[test]
    fn budget_is_enforced() {
        let f = fp(3);
        let atlas = Atlas::new(f);
        let s = atlas.system(SystemName::HeisenbergSystem);
        match PointSet::enumerate_varieties(&[&s], &f, 100) {
            Err(StructureError::BudgetExceeded { needed, budget }) => {
                assert_eq!(needed, 19683);
                assert_eq!(budget, 100);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn check_all_reports_offender() {
        let f = fp(2);
        let atlas = Atlas::new(f);
        let eta = atlas.base_vector(BaseVector::Heisenberg);
        let orb = PointSet::from_orbit(&eta, 1 << 20).unwrap();
        assert!(orb.check_all("nonzero", |v| !v.is_zero()).is_ok());
        let err = orb
            .check_all("first coordinate zero", |v| v.coords()[15].is_zero())
            .unwrap_err();
        assert!(err.contains("fails at ["), "{err}");
    }

    #[test]
    fn point_formatting() {
        let mut pt = vec![0u64; 27];
        assert_eq!(format_point(&pt), "[0]");
        pt[3] = 1;
        pt[9] = 4;
        assert_eq!(format_point(&pt), "[r4=1, r10=4]");
    }
}

//! Structure vectors, the change-of-basis action, and exact linear algebra.
//!
//! A bilinear bracket on an n-dimensional space over F is recorded as the
//! vector of its structure constants in F^(n^3), ordered lexicographically:
//! coordinate r (1-based) with r - 1 = (i-1)n^2 + (j-1)n + (k-1) holds the
//! coefficient of b_k in [b_i, b_j].  The vectors that come from Lie brackets
//! are exactly the common zeros of [`jacobi_generators`]: vanishing diagonal
//! brackets, antisymmetry, and the Jacobi quadratics.
//!
//! GL(n, F) acts on structure vectors on the right by change of basis.  For
//! a transition matrix g (columns = new basis in old coordinates) the new
//! constants are
//!
//! ```text
//! act(v, g)_{ijs} = sum_{p,q,r} g_{pi} g_{qj} v_{pqr} (g^{-1})_{sr}
//! ```
//!
//! For n = 3, antisymmetric vectors with zero diagonal brackets are
//! determined by the nine coordinates at positions (1,2,*), (1,3,*), (2,3,*);
//! [`reduce3`]/[`lift3`] convert between the full 27-coordinate form and that
//! chart, which is also what enumeration over small prime fields and CSV
//! export use.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::{self, Write};
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::field::{FieldDescriptor, FieldError, Scalar};
use crate::poly::{MultiPoly, VarTable};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("index ({i},{j},{k}) out of range for dimension {n}")]
    IndexOutOfRange { n: usize, i: usize, j: usize, k: usize },
    #[error("flat position {r} out of range for dimension {n}")]
    PositionOutOfRange { n: usize, r: usize },
    #[error("coordinate vector has length {got}, expected {expected}")]
    CoordinateCount { expected: usize, got: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("{0}")]
    NotReduced(String),
    #[error("enumeration needs {needed} candidates, over the budget of {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("operation requires a prime field, got {0}")]
    NotPrimeField(FieldDescriptor),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// 1-based flat position of (i, j, k), each in 1..=n.
pub fn index_of(n: usize, i: usize, j: usize, k: usize) -> Result<usize, StructureError> {
    if i < 1 || i > n || j < 1 || j > n || k < 1 || k > n {
        return Err(StructureError::IndexOutOfRange { n, i, j, k });
    }
    Ok((i - 1) * n * n + (j - 1) * n + k)
}

/// Inverse of [`index_of`]: the (i, j, k) triple at 1-based position r.
pub fn triple_of(n: usize, r: usize) -> Result<(usize, usize, usize), StructureError> {
    if r < 1 || r > n * n * n {
        return Err(StructureError::PositionOutOfRange { n, r });
    }
    let z = r - 1;
    Ok((z / (n * n) + 1, (z / n) % n + 1, z % n + 1))
}

#[inline]
fn idx0(n: usize, i: usize, j: usize, k: usize) -> usize {
    (i * n + j) * n + k
}

/// Variable table X111, X112, ..., Xnnn in flat-position order.
pub fn coordinate_table(n: usize) -> Arc<VarTable> {
    assert!(n <= 9, "single-digit index naming needs n <= 9");
    let mut names = Vec::with_capacity(n * n * n);
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                names.push(format!("X{i}{j}{k}"));
            }
        }
    }
    VarTable::new(names).unwrap()
}

/// A named list of polynomials over a common variable table.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySystem {
    name: String,
    table: Arc<VarTable>,
    gens: Vec<MultiPoly>,
}

impl PolySystem {
    pub fn new(name: impl Into<String>, table: Arc<VarTable>, gens: Vec<MultiPoly>) -> PolySystem {
        let name = name.into();
        for g in &gens {
            assert!(
                g.table().names() == table.names(),
                "generator of {name} over a different variable table"
            );
        }
        PolySystem { name, table, gens }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn gens(&self) -> &[MultiPoly] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn vanishes_at(&self, values: &[Scalar]) -> bool {
        self.gens.iter().all(|g| g.eval(values).is_zero())
    }

    /// Index and value of the first non-vanishing generator, if any.
    pub fn first_violation(&self, values: &[Scalar]) -> Option<(usize, Scalar)> {
        for (i, g) in self.gens.iter().enumerate() {
            let v = g.eval(values);
            if !v.is_zero() {
                return Some((i, v));
            }
        }
        None
    }

    /// A new system containing this one's generators followed by `more`'s.
    pub fn join(&self, name: impl Into<String>, more: &PolySystem) -> PolySystem {
        assert!(self.table.names() == more.table.names());
        let mut gens = self.gens.clone();
        gens.extend(more.gens.iter().cloned());
        PolySystem::new(name, Arc::clone(&self.table), gens)
    }
}

/// The full structure-constant vanishing system for dimension n: diagonal
/// brackets X_iik (n^2 generators), antisymmetry X_ijk + X_jik (n^3, with the
/// i = j duplicates kept), and the Jacobi quadratics
/// sum_k (X_ijk X_klr + X_jlk X_kir + X_lik X_kjr) for all (i, j, l, r)
/// (n^4, duplicates kept).
pub fn jacobi_generators(n: usize, field: &FieldDescriptor) -> PolySystem {
    let table = coordinate_table(n);
    let one = Scalar::one(field);
    let var = |i: usize, j: usize, k: usize| idx0(n, i, j, k);
    let mut gens = Vec::new();
    for i in 0..n {
        for k in 0..n {
            gens.push(MultiPoly::monomial(&table, one.clone(), &[(var(i, i, k), 1)]));
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let a = MultiPoly::monomial(&table, one.clone(), &[(var(i, j, k), 1)]);
                let b = MultiPoly::monomial(&table, one.clone(), &[(var(j, i, k), 1)]);
                gens.push(&a + &b);
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                for r in 0..n {
                    let mut g = MultiPoly::zero(&table, field);
                    for k in 0..n {
                        for (x, y) in [
                            (var(i, j, k), var(k, l, r)),
                            (var(j, l, k), var(k, i, r)),
                            (var(l, i, k), var(k, j, r)),
                        ] {
                            g = &g + &MultiPoly::monomial(&table, one.clone(), &[(x, 1), (y, 1)]);
                        }
                    }
                    gens.push(g);
                }
            }
        }
    }
    PolySystem::new("jacobi", table, gens)
}

type SystemCache = Mutex<HashMap<(usize, FieldDescriptor), Arc<PolySystem>>>;

fn jacobi_cached(n: usize, field: &FieldDescriptor) -> Arc<PolySystem> {
    static CACHE: OnceLock<SystemCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    Arc::clone(
        map.entry((n, *field))
            .or_insert_with(|| Arc::new(jacobi_generators(n, field))),
    )
}

/// The structure constants of a bilinear bracket on an n-dimensional space.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StructureVector {
    n: usize,
    field: FieldDescriptor,
    coords: Vec<Scalar>,
}

impl StructureVector {
    pub fn zero(n: usize, field: &FieldDescriptor) -> StructureVector {
        StructureVector {
            n,
            field: *field,
            coords: vec![Scalar::zero(field); n * n * n],
        }
    }

    pub fn from_coords(
        n: usize,
        field: &FieldDescriptor,
        coords: Vec<Scalar>,
    ) -> Result<StructureVector, StructureError> {
        if coords.len() != n * n * n {
            return Err(StructureError::CoordinateCount {
                expected: n * n * n,
                got: coords.len(),
            });
        }
        assert!(
            coords.iter().all(|c| c.descriptor() == *field),
            "coordinate from a different field"
        );
        Ok(StructureVector {
            n,
            field: *field,
            coords,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    /// Coefficient of b_k in [b_i, b_j] (1-based indices).
    pub fn get(&self, i: usize, j: usize, k: usize) -> &Scalar {
        let r = index_of(self.n, i, j, k).expect("index in range");
        &self.coords[r - 1]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, value: Scalar) {
        assert!(value.descriptor() == self.field, "value from a different field");
        let r = index_of(self.n, i, j, k).expect("index in range");
        self.coords[r - 1] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Scalar::is_zero)
    }
}

impl fmt::Display for StructureVector {
    /// Lists nonzero coordinates as `r=value` pairs, e.g. `[r16=1, r22=-1]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "[0]");
        }
        write!(f, "[")?;
        let mut first = true;
        for (z, c) in self.coords.iter().enumerate() {
            if !c.is_zero() {
                if !first {
                    write!(f, ", ")?;
                }
                write!(f, "r{}={}", z + 1, c)?;
                first = false;
            }
        }
        write!(f, "]")
    }
}

/// True iff the vector satisfies every generator of [`jacobi_generators`],
/// i.e. is the structure vector of a Lie bracket.
pub fn is_lie(v: &StructureVector) -> bool {
    jacobi_cached(v.n, &v.field).vanishes_at(&v.coords)
}

/// A square matrix over an exact field, row-major, 0-based accessors.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SquareMatrix {
    n: usize,
    field: FieldDescriptor,
    entries: Vec<Scalar>,
}

impl SquareMatrix {
    pub fn identity(n: usize, field: &FieldDescriptor) -> SquareMatrix {
        let mut m = SquareMatrix {
            n,
            field: *field,
            entries: vec![Scalar::zero(field); n * n],
        };
        for i in 0..n {
            m.entries[i * n + i] = Scalar::one(field);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<SquareMatrix, StructureError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(StructureError::CoordinateCount {
                    expected: n,
                    got: row.len(),
                });
            }
            entries.extend(row);
        }
        let field = entries
            .first()
            .map(Scalar::descriptor)
            .unwrap_or(FieldDescriptor::RATIONAL);
        assert!(
            entries.iter().all(|c| c.descriptor() == field),
            "entries from different fields"
        );
        Ok(SquareMatrix { n, field, entries })
    }

    pub fn from_int_rows(
        field: &FieldDescriptor,
        rows: &[&[i64]],
    ) -> Result<SquareMatrix, StructureError> {
        SquareMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Scalar::from_int(field, x)).collect())
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.entries[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Scalar) {
        assert!(value.descriptor() == self.field);
        self.entries[r * self.n + c] = value;
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn mul(&self, rhs: &SquareMatrix) -> SquareMatrix {
        assert!(self.n == rhs.n && self.field == rhs.field, "dimension/field mismatch");
        let n = self.n;
        let mut out = SquareMatrix {
            n,
            field: self.field,
            entries: vec![Scalar::zero(&self.field); n * n],
        };
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j);
                    out.entries[i * n + j] = cur + &(a * b);
                }
            }
        }
        out
    }

    pub fn scalar_mul(&self, c: &Scalar) -> SquareMatrix {
        assert!(c.descriptor() == self.field);
        SquareMatrix {
            n: self.n,
            field: self.field,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    /// Determinant of the submatrix with row `r` and column `c` deleted
    /// (an unsigned minor; cofactor signs are the caller's business).
    pub fn minor(&self, r: usize, c: usize) -> Scalar {
        assert!(self.n >= 2 && r < self.n && c < self.n);
        let rows: Vec<Vec<Scalar>> = (0..self.n)
            .filter(|&i| i != r)
            .map(|i| {
                (0..self.n)
                    .filter(|&j| j != c)
                    .map(|j| self.get(i, j).clone())
                    .collect()
            })
            .collect();
        SquareMatrix::from_rows(rows).unwrap().det()
    }

    /// The matrix of all unsigned minors: entry (r, c) is [`minor`](Self::minor)(r, c).
    pub fn minors(&self) -> SquareMatrix {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                entries.push(self.minor(r, c));
            }
        }
        SquareMatrix {
            n,
            field: self.field,
            entries,
        }
    }

    /// Exact determinant: cofactor expansion for n <= 3, Gaussian elimination
    /// with exact division otherwise.
    pub fn det(&self) -> Scalar {
        match self.n {
            0 => Scalar::one(&self.field),
            1 => self.entries[0].clone(),
            2 => {
                &(self.get(0, 0) * self.get(1, 1)) - &(self.get(0, 1) * self.get(1, 0))
            }
            3 => {
                let m = |r: usize, c: usize| self.get(r, c);
                let mut acc = m(0, 0) * &(&(m(1, 1) * m(2, 2)) - &(m(1, 2) * m(2, 1)));
                acc = &acc - &(m(0, 1) * &(&(m(1, 0) * m(2, 2)) - &(m(1, 2) * m(2, 0))));
                acc = &acc + &(m(0, 2) * &(&(m(1, 0) * m(2, 1)) - &(m(1, 1) * m(2, 0))));
                acc
            }
            _ => self.det_gaussian(),
        }
    }

    /// Gaussian-elimination determinant, kept separate so tests can cross
    /// check it against the cofactor route.
    pub(crate) fn det_gaussian(&self) -> Scalar {
        let n = self.n;
        let mut a: Vec<Vec<Scalar>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let mut det = Scalar::one(&self.field);
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Scalar::zero(&self.field);
            };
            if pivot != col {
                a.swap(pivot, col);
                det = -&det;
            }
            let p = a[col][col].clone();
            det = &det * &p;
            let pinv = p.inv().expect("pivot nonzero");
            let (top, rest) = a.split_at_mut(col + 1);
            let pivot_row = &top[col];
            for row in rest.iter_mut() {
                if row[col].is_zero() {
                    continue;
                }
                let factor = &row[col] * &pinv;
                for (c, pv) in pivot_row.iter().enumerate().skip(col) {
                    let delta = &factor * pv;
                    row[c] = &row[c] - &delta;
                }
            }
        }
        det
    }

    /// Exact inverse: adjugate/determinant for n = 3 (so the minors route is
    /// exercised), Gauss-Jordan elimination otherwise.
    pub fn inverse(&self) -> Result<SquareMatrix, StructureError> {
        if self.n == 3 {
            let det = self.det();
            if det.is_zero() {
                return Err(StructureError::Singular);
            }
            let dinv = det.inv().unwrap();
            let minors = self.minors();
            let n = 3;
            let mut entries = vec![Scalar::zero(&self.field); n * n];
            for s in 0..n {
                for r in 0..n {
                    // (g^-1)_{sr} = (-1)^{s+r} minor(r, s) / det
                    let mut v = minors.get(r, s) * &dinv;
                    if (s + r) % 2 == 1 {
                        v = -&v;
                    }
                    entries[s * n + r] = v;
                }
            }
            return Ok(SquareMatrix {
                n,
                field: self.field,
                entries,
            });
        }
        self.inverse_gauss_jordan()
    }

    fn inverse_gauss_jordan(&self) -> Result<SquareMatrix, StructureError> {
        let n = self.n;
        let mut a: Vec<Vec<Scalar>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let mut b: Vec<Vec<Scalar>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            Scalar::one(&self.field)
                        } else {
                            Scalar::zero(&self.field)
                        }
                    })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Err(StructureError::Singular);
            };
            a.swap(pivot, col);
            b.swap(pivot, col);
            let pinv = a[col][col].inv().unwrap();
            for c in 0..n {
                a[col][c] = &a[col][c] * &pinv;
                b[col][c] = &b[col][c] * &pinv;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col].clone();
                for c in 0..n {
                    let da = &factor * &a[col][c];
                    a[r][c] = &a[r][c] - &da;
                    let db = &factor * &b[col][c];
                    b[r][c] = &b[r][c] - &db;
                }
            }
        }
        SquareMatrix::from_rows(b)
    }
}

impl fmt::Display for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.n {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for c in 0..self.n {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Right action of an invertible transition matrix on a structure vector:
/// `act(v, g)_{ijs} = sum_{p,q,r} g_{pi} g_{qj} v_{pqr} (g^{-1})_{sr}`.
///
/// Satisfies act(v, id) = v and act(act(v, g), h) = act(v, g*h).
pub fn act(v: &StructureVector, g: &SquareMatrix) -> Result<StructureVector, StructureError> {
    assert!(v.n == g.n && v.field == g.field, "dimension/field mismatch");
    let ginv = g.inverse()?;
    let n = v.n;
    let zero = Scalar::zero(&v.field);
    // mid[(i, j, r)] = sum_{p,q} g_{pi} g_{qj} v_{pqr}
    let mut mid = vec![zero.clone(); n * n * n];
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                let c = &v.coords[idx0(n, p, q, r)];
                if c.is_zero() {
                    continue;
                }
                for i in 0..n {
                    let gpi = g.get(p, i);
                    if gpi.is_zero() {
                        continue;
                    }
                    let gc = gpi * c;
                    for j in 0..n {
                        let gqj = g.get(q, j);
                        if gqj.is_zero() {
                            continue;
                        }
                        let t = idx0(n, i, j, r);
                        mid[t] = &mid[t] + &(&gc * gqj);
                    }
                }
            }
        }
    }
    let mut out = StructureVector::zero(n, &v.field);
    for i in 0..n {
        for j in 0..n {
            for r in 0..n {
                let m = &mid[idx0(n, i, j, r)];
                if m.is_zero() {
                    continue;
                }
                for s in 0..n {
                    let gs = ginv.get(s, r);
                    if gs.is_zero() {
                        continue;
                    }
                    let t = idx0(n, i, j, s);
                    out.coords[t] = &out.coords[t] + &(m * gs);
                }
            }
        }
    }
    Ok(out)
}

/// 1-based flat positions of the reduced chart for n = 3, in the order
/// (1,2,1), (1,2,2), (1,2,3), (1,3,1), (1,3,2), (1,3,3), (2,3,1), (2,3,2), (2,3,3).
pub const REDUCED_POSITIONS: [usize; 9] = [4, 5, 6, 7, 8, 9, 16, 17, 18];

/// CSV header for reduced-chart exports, matching [`REDUCED_POSITIONS`].
pub const REDUCED_CSV_HEADER: &str = "g121,g122,g123,g131,g132,g133,g231,g232,g233";

/// The nine free coordinates of an antisymmetric, zero-diagonal structure
/// vector on a 3-dimensional space.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReducedVector3 {
    field: FieldDescriptor,
    coords: Vec<Scalar>,
}

impl ReducedVector3 {
    pub fn from_coords(
        field: &FieldDescriptor,
        coords: Vec<Scalar>,
    ) -> Result<ReducedVector3, StructureError> {
        if coords.len() != 9 {
            return Err(StructureError::CoordinateCount {
                expected: 9,
                got: coords.len(),
            });
        }
        assert!(coords.iter().all(|c| c.descriptor() == *field));
        Ok(ReducedVector3 {
            field: *field,
            coords,
        })
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn csv_row(&self) -> String {
        self.coords
            .iter()
            .map(Scalar::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Projects a vector that satisfies the diagonal and antisymmetry relations
/// onto the reduced chart; reports which relation fails otherwise.
pub fn reduce3(v: &StructureVector) -> Result<ReducedVector3, StructureError> {
    assert_eq!(v.n, 3, "reduced chart is specific to n = 3");
    for i in 1..=3 {
        for k in 1..=3 {
            if !v.get(i, i, k).is_zero() {
                return Err(StructureError::NotReduced(format!(
                    "diagonal bracket coordinate ({i},{i},{k}) is nonzero"
                )));
            }
        }
    }
    for i in 1..=3 {
        for j in i + 1..=3 {
            for k in 1..=3 {
                if !(v.get(i, j, k) + v.get(j, i, k)).is_zero() {
                    return Err(StructureError::NotReduced(format!(
                        "antisymmetry fails at ({i},{j},{k})"
                    )));
                }
            }
        }
    }
    let coords = REDUCED_POSITIONS
        .iter()
        .map(|&r| v.coords[r - 1].clone())
        .collect();
    ReducedVector3::from_coords(&v.field, coords)
}

/// Rebuilds the full 27-coordinate vector from the reduced chart, filling in
/// the antisymmetric completions and zero diagonal.
pub fn lift3(rv: &ReducedVector3) -> StructureVector {
    let mut v = StructureVector::zero(3, &rv.field);
    for (slot, &r) in REDUCED_POSITIONS.iter().enumerate() {
        let (i, j, k) = triple_of(3, r).unwrap();
        v.coords[r - 1] = rv.coords[slot].clone();
        let mirror = index_of(3, j, i, k).unwrap();
        v.coords[mirror - 1] = -&rv.coords[slot];
    }
    v
}

/// Iterator over all invertible n x n matrices over F_p, in odometer order of
/// their entry vectors.  Construction fails if p^(n^2) exceeds `budget`.
pub struct GlIter {
    n: usize,
    p: u64,
    field: FieldDescriptor,
    next_code: u64,
    total: u64,
}

impl Iterator for GlIter {
    type Item = SquareMatrix;

    fn next(&mut self) -> Option<SquareMatrix> {
        while self.next_code < self.total {
            let mut code = self.next_code;
            self.next_code += 1;
            let nn = self.n * self.n;
            let mut entries = Vec::with_capacity(nn);
            for _ in 0..nn {
                entries.push(Scalar::from_int(&self.field, (code % self.p) as i64));
                code /= self.p;
            }
            let m = SquareMatrix {
                n: self.n,
                field: self.field,
                entries,
            };
            if !m.det().is_zero() {
                return Some(m);
            }
        }
        None
    }
}

pub fn gl_enumerate(n: usize, p: u64, budget: u64) -> Result<GlIter, StructureError> {
    let field = FieldDescriptor::prime(p)?;
    let needed = p
        .checked_pow((n * n) as u32)
        .ok_or(StructureError::BudgetExceeded {
            needed: u64::MAX,
            budget,
        })?;
    if needed > budget {
        return Err(StructureError::BudgetExceeded { needed, budget });
    }
    Ok(GlIter {
        n,
        p,
        field,
        next_code: 0,
        total: needed,
    })
}

/// Full orbit of `v` under GL(n, p) by exhaustive enumeration.  Requires a
/// prime-field vector; the budget bounds the p^(n^2) candidate matrices.
pub fn orbit(
    v: &StructureVector,
    budget: u64,
) -> Result<BTreeSet<StructureVector>, StructureError> {
    let Some(p) = v.field.modulus() else {
        return Err(StructureError::NotPrimeField(v.field));
    };
    let mut set = BTreeSet::new();
    for g in gl_enumerate(v.n, p, budget)? {
        set.insert(act(v, &g)?);
    }
    Ok(set)
}

/// Smallest primitive root mod p (p prime).
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let phi = p - 1;
    let mut factors = Vec::new();
    let mut m = phi;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            factors.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    let field = FieldDescriptor::prime(p).unwrap();
    'outer: for g in 2..p {
        let gs = Scalar::from_int(&field, g as i64);
        for &q in &factors {
            if gs.pow(phi / q).is_one() {
                continue 'outer;
            }
        }
        return g;
    }
    unreachable!("every prime has a primitive root");
}

/// A generating set for GL(n, p): all elementary transvections E_ab(1) plus,
/// for p > 2, diag(u, 1, ..., 1) with u a primitive root mod p.  Row
/// reduction writes any invertible matrix as a product of these, so checking
/// closure of a finite set under this family proves closure under the group.
pub fn gl_generators(n: usize, p: u64) -> Vec<SquareMatrix> {
    let field = FieldDescriptor::prime(p).expect("prime p");
    let mut gens = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let mut m = SquareMatrix::identity(n, &field);
            m.set(a, b, Scalar::one(&field));
            gens.push(m);
        }
    }
    if p > 2 {
        let mut m = SquareMatrix::identity(n, &field);
        m.set(0, 0, Scalar::from_int(&field, primitive_root(p) as i64));
        gens.push(m);
    }
    gens
}

/// Writes reduced-chart points as CSV with the [`REDUCED_CSV_HEADER`] header.
pub fn write_reduced_csv<'a, W, I>(w: &mut W, points: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a ReducedVector3>,
{
    writeln!(w, "{REDUCED_CSV_HEADER}")?;
    for p in points {
        writeln!(w, "{}", p.csv_row())?;
    }
    Ok(())
}

/// Writes full 27-coordinate vectors as CSV with an x111..x333 header.
pub fn write_full_csv<'a, W, I>(w: &mut W, vectors: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a StructureVector>,
{
    let mut wrote_header = false;
    for v in vectors {
        if !wrote_header {
            let names: Vec<String> = (1..=v.n * v.n * v.n)
                .map(|r| {
                    let (i, j, k) = triple_of(v.n, r).unwrap();
                    format!("x{i}{j}{k}")
                })
                .collect();
            writeln!(w, "{}", names.join(","))?;
            wrote_header = true;
        }
        let row: Vec<String> = v.coords.iter().map(Scalar::to_string).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn q() -> FieldDescriptor {
        FieldDescriptor::RATIONAL
    }

    fn fp(p: u64) -> FieldDescriptor {
        FieldDescriptor::prime(p).unwrap()
    }

    /// [b2, b3] = b1 bracket (and its antisymmetric mirror), the 3-dimensional
    /// two-step nilpotent algebra plus center.
    fn heisenberg(field: &FieldDescriptor) -> StructureVector {
        let mut v = StructureVector::zero(3, field);
        v.set(2, 3, 1, Scalar::one(field));
        v.set(3, 2, 1, Scalar::from_int(field, -1));
        v
    }

    /// [b1, b2] = b1 bracket: the nonabelian 2-dimensional algebra plus an
    /// abelian direction.
    fn affine(field: &FieldDescriptor) -> StructureVector {
        let mut v = StructureVector::zero(3, field);
        v.set(1, 2, 1, Scalar::one(field));
        v.set(2, 1, 1, Scalar::from_int(field, -1));
        v
    }

    #[test]
    fn flat_index_hand_values() {
        assert_eq!(index_of(3, 1, 1, 1).unwrap(), 1);
        assert_eq!(index_of(3, 1, 2, 1).unwrap(), 4);
        assert_eq!(index_of(3, 2, 1, 1).unwrap(), 10);
        assert_eq!(index_of(3, 2, 3, 1).unwrap(), 16);
        assert_eq!(index_of(3, 3, 2, 1).unwrap(), 22);
        assert_eq!(index_of(3, 3, 3, 3).unwrap(), 27);
        assert_eq!(triple_of(2, 4).unwrap(), (1, 2, 2));
        assert_eq!(triple_of(2, 5).unwrap(), (2, 1, 1));
    }

    #[test]
    fn flat_index_roundtrip_and_errors() {
        for n in [1usize, 2, 3, 4] {
            let mut seen = std::collections::HashSet::new();
            for i in 1..=n {
                for j in 1..=n {
                    for k in 1..=n {
                        let r = index_of(n, i, j, k).unwrap();
                        assert!((1..=n * n * n).contains(&r));
                        assert!(seen.insert(r), "position collision");
                        assert_eq!(triple_of(n, r).unwrap(), (i, j, k));
                    }
                }
            }
            assert_eq!(seen.len(), n * n * n);
        }
        assert!(index_of(3, 0, 1, 1).is_err());
        assert!(index_of(3, 1, 4, 1).is_err());
        assert!(triple_of(3, 0).is_err());
        assert!(triple_of(3, 28).is_err());
    }

    #[test]
    fn coordinate_table_names() {
        let t = coordinate_table(3);
        assert_eq!(t.len(), 27);
        assert_eq!(t.name(0), "X111");
        assert_eq!(t.name(3), "X121");
        assert_eq!(t.name(26), "X333");
        assert_eq!(t.index_of("X231"), Some(15));
    }

    #[test]
    fn jacobi_family_sizes() {
        let s2 = jacobi_generators(2, &q());
        assert_eq!(s2.len(), 4 + 8 + 16);
        let s3 = jacobi_generators(3, &q());
        assert_eq!(s3.len(), 9 + 27 + 81);
    }

    #[test]
    fn lie_membership_frozen_cases() {
        for f in [q(), fp(2), fp(3)] {
            assert!(is_lie(&StructureVector::zero(3, &f)));
            assert!(is_lie(&heisenberg(&f)));
            assert!(is_lie(&affine(&f)));
        }
        // diagonal-bracket violation
        let mut v = StructureVector::zero(3, &q());
        v.set(1, 1, 1, Scalar::one(&q()));
        assert!(!is_lie(&v));
        // antisymmetry violation
        let mut v = StructureVector::zero(3, &q());
        v.set(1, 2, 3, Scalar::one(&q()));
        assert!(!is_lie(&v));
        // antisymmetric but fails the Jacobi identity:
        // [b1,b2] = b3, [b2,b3] = b2 gives Jacobi defect -b3
        let mut v = StructureVector::zero(3, &q());
        v.set(1, 2, 3, Scalar::one(&q()));
        v.set(2, 1, 3, Scalar::from_int(&q(), -1));
        v.set(2, 3, 2, Scalar::one(&q()));
        v.set(3, 2, 2, Scalar::from_int(&q(), -1));
        assert!(!is_lie(&v));
    }

    #[test]
    fn determinant_hand_values() {
        let m = SquareMatrix::from_int_rows(&q(), &[&[1, 2], &[3, 4]]).unwrap();
        assert_eq!(m.det(), Scalar::from_int(&q(), -2));
        let m = SquareMatrix::from_int_rows(&q(), &[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]).unwrap();
        assert_eq!(m.det(), Scalar::from_int(&q(), -3));
        let m = SquareMatrix::from_int_rows(&q(), &[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]).unwrap();
        assert!(m.det().is_zero());
        let m = SquareMatrix::from_int_rows(&fp(2), &[&[1, 1], &[0, 1]]).unwrap();
        assert!(m.det().is_one());
        assert!(SquareMatrix::identity(4, &q()).det().is_one());
    }

    #[test]
    fn cofactor_det_agrees_with_gaussian() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for f in [q(), fp(5)] {
            for _ in 0..200 {
                let rows: Vec<Vec<Scalar>> = (0..3)
                    .map(|_| {
                        (0..3)
                            .map(|_| Scalar::from_int(&f, rng.gen_range(-6..7)))
                            .collect()
                    })
                    .collect();
                let m = SquareMatrix::from_rows(rows).unwrap();
                assert_eq!(m.det(), m.det_gaussian());
            }
        }
    }

    #[test]
    fn minors_hand_values() {
        let id = SquareMatrix::identity(3, &q());
        assert_eq!(id.minors(), id);
        let m = SquareMatrix::from_int_rows(&q(), &[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]).unwrap();
        let expect =
            SquareMatrix::from_int_rows(&q(), &[&[2, -2, -3], &[-4, -11, -6], &[-3, -6, -3]])
                .unwrap();
        assert_eq!(m.minors(), expect);
    }

    #[test]
    fn inverse_roundtrip_and_singular() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for f in [q(), fp(7)] {
            let mut produced = 0;
            while produced < 50 {
                let rows: Vec<Vec<Scalar>> = (0..3)
                    .map(|_| {
                        (0..3)
                            .map(|_| Scalar::from_int(&f, rng.gen_range(-9..10)))
                            .collect()
                    })
                    .collect();
                let m = SquareMatrix::from_rows(rows).unwrap();
                if m.det().is_zero() {
                    continue;
                }
                produced += 1;
                let inv = m.inverse().unwrap();
                assert_eq!(m.mul(&inv), SquareMatrix::identity(3, &f));
                assert_eq!(inv.mul(&m), SquareMatrix::identity(3, &f));
                // adjugate route must agree with Gauss-Jordan
                assert_eq!(inv, m.inverse_gauss_jordan().unwrap());
            }
        }
        let sing = SquareMatrix::from_int_rows(&q(), &[&[1, 2], &[2, 4]]).unwrap();
        assert_eq!(sing.inverse().unwrap_err(), StructureError::Singular);
        let sing3 =
            SquareMatrix::from_int_rows(&q(), &[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]).unwrap();
        assert_eq!(sing3.inverse().unwrap_err(), StructureError::Singular);
    }

    #[test]
    fn act_identity_fixes_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for f in [q(), fp(3)] {
            let id = SquareMatrix::identity(3, &f);
            for _ in 0..25 {
                let coords: Vec<Scalar> = (0..27)
                    .map(|_| Scalar::from_int(&f, rng.gen_range(-5..6)))
                    .collect();
                let v = StructureVector::from_coords(3, &f, coords).unwrap();
                assert_eq!(act(&v, &id).unwrap(), v);
            }
        }
    }

    #[test]
    fn act_singular_matrix_rejected() {
        let v = heisenberg(&q());
        let m = SquareMatrix::from_int_rows(&q(), &[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]).unwrap();
        assert_eq!(act(&v, &m).unwrap_err(), StructureError::Singular);
    }

    #[test]
    fn act_matches_hand_computed_basis_changes() {
        let f = q();
        // cyclic permutation b1' = b2, b2' = b3, b3' = b1 sends the
        // [b2,b3] = b1 bracket to [b1',b2'] = b3'
        let g = SquareMatrix::from_int_rows(&f, &[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]).unwrap();
        let out = act(&heisenberg(&f), &g).unwrap();
        let mut expect = StructureVector::zero(3, &f);
        expect.set(1, 2, 3, Scalar::one(&f));
        expect.set(2, 1, 3, Scalar::from_int(&f, -1));
        assert_eq!(out, expect);
        // transposition b1' = b2, b2' = b1 sends it to [b1',b3'] = b2'
        let g = SquareMatrix::from_int_rows(&f, &[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]).unwrap();
        let out = act(&heisenberg(&f), &g).unwrap();
        let mut expect = StructureVector::zero(3, &f);
        expect.set(1, 3, 2, Scalar::one(&f));
        expect.set(3, 1, 2, Scalar::from_int(&f, -1));
        assert_eq!(out, expect);
    }

    fn random_invertible(f: &FieldDescriptor, rng: &mut ChaCha8Rng) -> SquareMatrix {
        loop {
            let rows: Vec<Vec<Scalar>> = (0..3)
                .map(|_| {
                    (0..3)
                        .map(|_| Scalar::from_int(f, rng.gen_range(-5..6)))
                        .collect()
                })
                .collect();
            let m = SquareMatrix::from_rows(rows).unwrap();
            if !m.det().is_zero() {
                return m;
            }
        }
    }

    #[test]
    fn act_composition_law_sampled() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for f in [q(), fp(5)] {
            for _ in 0..60 {
                let coords: Vec<Scalar> = (0..27)
                    .map(|_| Scalar::from_int(&f, rng.gen_range(-4..5)))
                    .collect();
                let v = StructureVector::from_coords(3, &f, coords).unwrap();
                let g = random_invertible(&f, &mut rng);
                let h = random_invertible(&f, &mut rng);
                let two_step = act(&act(&v, &g).unwrap(), &h).unwrap();
                let one_step = act(&v, &g.mul(&h)).unwrap();
                assert_eq!(two_step, one_step);
            }
        }
    }

    #[test]
    fn act_scaling_law_sampled() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = q();
        for _ in 0..40 {
            let v = heisenberg(&f);
            let g = random_invertible(&f, &mut rng);
            let c = Scalar::from_int(&f, rng.gen_range(1..9));
            let scaled = act(&v, &g.scalar_mul(&c)).unwrap();
            let direct = act(&v, &g).unwrap();
            let expected = StructureVector::from_coords(
                3,
                &f,
                direct.coords().iter().map(|x| x * &c).collect(),
            )
            .unwrap();
            assert_eq!(scaled, expected);
        }
    }

    #[test]
    fn act_preserves_lie_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = q();
        for _ in 0..20 {
            let g = random_invertible(&f, &mut rng);
            assert!(is_lie(&act(&heisenberg(&f), &g).unwrap()));
            assert!(is_lie(&act(&affine(&f), &g).unwrap()));
            // and non-Lie stays non-Lie
            let mut v = StructureVector::zero(3, &f);
            v.set(1, 1, 1, Scalar::one(&f));
            assert!(!is_lie(&act(&v, &g).unwrap()));
        }
    }

    #[test]
    fn reduced_chart_roundtrip() {
        let f = q();
        let v = heisenberg(&f);
        let rv = reduce3(&v).unwrap();
        let expect: Vec<Scalar> = [0, 0, 0, 0, 0, 0, 1, 0, 0]
            .iter()
            .map(|&x| Scalar::from_int(&f, x))
            .collect();
        assert_eq!(rv.coords(), expect.as_slice());
        assert_eq!(lift3(&rv), v);

        // all 512 reduced vectors over F_2 lift to antisymmetric vectors and
        // project back unchanged
        let f2 = fp(2);
        for code in 0u32..512 {
            let coords: Vec<Scalar> = (0..9)
                .map(|b| Scalar::from_int(&f2, ((code >> b) & 1) as i64))
                .collect();
            let rv = ReducedVector3::from_coords(&f2, coords).unwrap();
            let lifted = lift3(&rv);
            assert_eq!(reduce3(&lifted).unwrap(), rv);
        }
    }

    #[test]
    fn reduce_rejects_non_reduced_vectors() {
        let f = q();
        let mut v = StructureVector::zero(3, &f);
        v.set(1, 1, 2, Scalar::one(&f));
        assert!(matches!(
            reduce3(&v).unwrap_err(),
            StructureError::NotReduced(msg) if msg.contains("diagonal")
        ));
        let mut v = StructureVector::zero(3, &f);
        v.set(1, 2, 1, Scalar::one(&f));
        assert!(matches!(
            reduce3(&v).unwrap_err(),
            StructureError::NotReduced(msg) if msg.contains("antisymmetry")
        ));
    }

    #[test]
    fn gl_counts_small() {
        assert_eq!(gl_enumerate(2, 2, 1 << 20).unwrap().count(), 6);
        assert_eq!(gl_enumerate(3, 2, 1 << 20).unwrap().count(), 168);
        assert_eq!(gl_enumerate(3, 3, 1 << 20).unwrap().count(), 11232);
    }

    #[test]
    fn gl_budget_enforced() {
        assert!(matches!(
            gl_enumerate(3, 7, 2_000_000),
            Err(StructureError::BudgetExceeded {
                needed: 40_353_607,
                budget: 2_000_000
            })
        ));
        // p = 5 fits exactly under the default-style budget
        assert!(gl_enumerate(3, 5, 1_953_125).is_ok());
        assert!(matches!(
            gl_enumerate(3, 4, 1 << 20),
            Err(StructureError::Field(FieldError::NotPrime(4)))
        ));
    }

    #[test]
    fn orbit_counts_frozen() {
        let f2 = fp(2);
        assert_eq!(
            orbit(&StructureVector::zero(3, &f2), 1 << 20).unwrap().len(),
            1
        );
        // |GL(3,2)| / |stabilizer| = 168 / 24
        assert_eq!(orbit(&heisenberg(&f2), 1 << 20).unwrap().len(), 7);
        // 168 / 4
        assert_eq!(orbit(&affine(&f2), 1 << 20).unwrap().len(), 42);
        let f3 = fp(3);
        // 11232 / 432 and 11232 / 36
        assert_eq!(orbit(&heisenberg(&f3), 1 << 20).unwrap().len(), 26);
        assert_eq!(orbit(&affine(&f3), 1 << 20).unwrap().len(), 312);
    }

    #[test]
    fn orbit_requires_prime_field() {
        assert!(matches!(
            orbit(&heisenberg(&q()), 1 << 20),
            Err(StructureError::NotPrimeField(_))
        ));
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(2), 1);
        assert_eq!(primitive_root(3), 2);
        assert_eq!(primitive_root(5), 2);
        assert_eq!(primitive_root(7), 3);
        assert_eq!(primitive_root(101), 2);
    }

    #[test]
    fn generators_close_to_the_full_group() {
        // BFS closure of the generating family reproduces the known group
        // orders, validating the generating-set argument used for stability
        // checks.
        for (n, p, expect) in [(2usize, 2u64, 6usize), (2, 3, 48), (3, 2, 168)] {
            let gens = gl_generators(n, p);
            let mut seen: BTreeSet<SquareMatrix> = BTreeSet::new();
            let field = FieldDescriptor::prime(p).unwrap();
            let mut frontier = vec![SquareMatrix::identity(n, &field)];
            seen.insert(frontier[0].clone());
            while let Some(m) = frontier.pop() {
                for g in &gens {
                    let prod = m.mul(g);
                    if seen.insert(prod.clone()) {
                        frontier.push(prod);
                    }
                }
            }
            assert_eq!(seen.len(), expect, "closure of GL({n},{p}) generators");
        }
    }

    #[test]
    fn csv_output_frozen() {
        let f2 = fp(2);
        let a = ReducedVector3::from_coords(
            &f2,
            (0..9).map(|i| Scalar::from_int(&f2, (i == 6) as i64)).collect(),
        )
        .unwrap();
        let b = ReducedVector3::from_coords(
            &f2,
            (0..9).map(|_| Scalar::zero(&f2)).collect(),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_reduced_csv(&mut buf, [&b, &a]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "g121,g122,g123,g131,g132,g133,g231,g232,g233\n\
             0,0,0,0,0,0,0,0,0\n\
             0,0,0,0,0,0,1,0,0\n"
        );
        let mut buf = Vec::new();
        write_full_csv(&mut buf, [&heisenberg(&f2)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x111,x112,x113,x121,"));
        let row = text.lines().nth(1).unwrap();
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 27);
        assert_eq!(fields[15], "1");
        assert_eq!(fields[21], "1"); // -1 over F_2
    }

    #[test]
    fn display_forms() {
        let f = q();
        let v = heisenberg(&f);
        assert_eq!(v.to_string(), "[r16=1, r22=-1]");
        assert_eq!(StructureVector::zero(3, &f).to_string(), "[0]");
        let m = SquareMatrix::identity(2, &f);
        assert_eq!(m.to_string(), "[[1, 0], [0, 1]]");
    }
}

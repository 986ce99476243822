//! Sparse multivariate polynomials with exact coefficients.
//!
//! A polynomial is a map from exponent vectors to nonzero scalars over a
//! shared, `Arc`-owned variable table.  The term map is a `BTreeMap`, so every
//! polynomial is in canonical form by construction: structural equality is
//! mathematical equality, and rendering order is deterministic.
//!
//! Besides the ring operations this module provides positional and named
//! evaluation, substitution of polynomials for variables, a reduction that
//! treats a designated variable pair as mutual inverses (used to certify
//! identities that hold on the locus where some parameter is invertible), and
//! a parser for a plain text syntax (`"X121^2 - X123 X231"`, `"- mu nu"`,
//! `"2/3 alpha"`) so built-in data tables stay human-auditable.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::field::{FieldDescriptor, Scalar};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("duplicate variable name {0:?}")]
    DuplicateVariable(String),
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("exponent vector has length {got}, expected {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("coefficient field {got} does not match polynomial field {expected}")]
    FieldMismatch {
        expected: FieldDescriptor,
        got: FieldDescriptor,
    },
    #[error("no value assigned to variable {0:?}")]
    MissingVariable(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// An ordered list of variable names shared by a family of polynomials.
#[derive(Debug, PartialEq, Eq)]
pub struct VarTable {
    names: Vec<String>,
}

impl VarTable {
    pub fn new<I, S>(names: I) -> Result<Arc<VarTable>, PolyError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(PolyError::DuplicateVariable(n.clone()));
            }
        }
        Ok(Arc::new(VarTable { names }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

fn same_table(a: &Arc<VarTable>, b: &Arc<VarTable>) -> bool {
    Arc::ptr_eq(a, b) || a.names == b.names
}

/// A sparse multivariate polynomial in canonical form (no zero coefficients,
/// exponent vectors of full table arity, deterministic term order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    table: Arc<VarTable>,
    field: FieldDescriptor,
    terms: BTreeMap<Vec<u32>, Scalar>,
}

impl MultiPoly {
    pub fn zero(table: &Arc<VarTable>, field: &FieldDescriptor) -> MultiPoly {
        MultiPoly {
            table: Arc::clone(table),
            field: *field,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(table: &Arc<VarTable>, value: Scalar) -> MultiPoly {
        let field = value.descriptor();
        let mut p = MultiPoly::zero(table, &field);
        if !value.is_zero() {
            p.terms.insert(vec![0; table.len()], value);
        }
        p
    }

    pub fn one(table: &Arc<VarTable>, field: &FieldDescriptor) -> MultiPoly {
        MultiPoly::constant(table, Scalar::one(field))
    }

    /// The variable with index `idx`.
    pub fn var(table: &Arc<VarTable>, field: &FieldDescriptor, idx: usize) -> MultiPoly {
        MultiPoly::monomial(table, Scalar::one(field), &[(idx, 1)])
    }

    /// coeff * prod var^exp over the given (variable index, exponent) pairs.
    pub fn monomial(
        table: &Arc<VarTable>,
        coeff: Scalar,
        powers: &[(usize, u32)],
    ) -> MultiPoly {
        let field = coeff.descriptor();
        let mut exps = vec![0u32; table.len()];
        for &(idx, e) in powers {
            assert!(idx < table.len(), "variable index {idx} out of range");
            exps[idx] += e;
        }
        let mut p = MultiPoly::zero(table, &field);
        if !coeff.is_zero() {
            p.terms.insert(exps, coeff);
        }
        p
    }

    /// Builds a polynomial from raw (exponent vector, coefficient) pairs,
    /// merging duplicates and dropping anything that cancels to zero.
    pub fn from_terms<I>(
        table: &Arc<VarTable>,
        field: &FieldDescriptor,
        terms: I,
    ) -> Result<MultiPoly, PolyError>
    where
        I: IntoIterator<Item = (Vec<u32>, Scalar)>,
    {
        let mut p = MultiPoly::zero(table, field);
        for (exps, coeff) in terms {
            if exps.len() != table.len() {
                return Err(PolyError::ArityMismatch {
                    expected: table.len(),
                    got: exps.len(),
                });
            }
            if coeff.descriptor() != *field {
                return Err(PolyError::FieldMismatch {
                    expected: *field,
                    got: coeff.descriptor(),
                });
            }
            p.add_term(exps, coeff);
        }
        Ok(p)
    }

    fn add_term(&mut self, exps: Vec<u32>, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Scalar)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn coeff(&self, exps: &[u32]) -> Option<&Scalar> {
        self.terms.get(exps)
    }

    fn assert_compatible(&self, other: &MultiPoly) {
        assert!(
            same_table(&self.table, &other.table),
            "polynomials over different variable tables"
        );
        assert!(
            self.field == other.field,
            "polynomials over different fields ({} vs {})",
            self.field,
            other.field
        );
    }

    pub fn scalar_mul(&self, c: &Scalar) -> MultiPoly {
        assert!(
            c.descriptor() == self.field,
            "scalar from a different field"
        );
        let mut out = MultiPoly::zero(&self.table, &self.field);
        if c.is_zero() {
            return out;
        }
        for (e, k) in &self.terms {
            out.terms.insert(e.clone(), k * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(&self.table, &self.field);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluates at a full positional value vector.
    pub fn eval(&self, values: &[Scalar]) -> Scalar {
        assert_eq!(
            values.len(),
            self.table.len(),
            "value vector arity mismatch"
        );
        let mut acc = Scalar::zero(&self.field);
        for (exps, coeff) in &self.terms {
            let mut term = coeff.clone();
            for (v, &e) in values.iter().zip(exps.iter()) {
                if e == 1 {
                    term = &term * v;
                } else if e > 1 {
                    term = &term * &v.pow(e as u64);
                }
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Evaluates under a named assignment over the same table.
    pub fn eval_with(&self, assignment: &Assignment) -> Result<Scalar, PolyError> {
        if !same_table(&self.table, &assignment.table) {
            return Err(PolyError::Parse(
                "assignment built over a different variable table".into(),
            ));
        }
        Ok(self.eval(&assignment.values))
    }

    /// Substitutes `images[i]` (a polynomial over `target`) for variable i.
    pub fn substitute(&self, target: &Arc<VarTable>, images: &[MultiPoly]) -> MultiPoly {
        assert_eq!(
            images.len(),
            self.table.len(),
            "need one image per variable"
        );
        for im in images {
            assert!(
                same_table(&im.table, target) && im.field == self.field,
                "substitution images must share the target table and field"
            );
        }
        let mut acc = MultiPoly::zero(target, &self.field);
        for (exps, coeff) in &self.terms {
            let mut term = MultiPoly::constant(target, coeff.clone());
            for (im, &e) in images.iter().zip(exps.iter()) {
                if e > 0 {
                    term = &term * &im.pow(e);
                }
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Treats variables `a` and `b` as mutual inverses: every monomial's
    /// exponent pair (i, j) at (a, b) is reduced to (i-m, j-m), m = min(i, j),
    /// merging any terms that collide.  The result is zero exactly when the
    /// original polynomial lies in the ideal generated by a*b - 1.
    pub fn cancel_inverse_pair(&self, a: usize, b: usize) -> MultiPoly {
        assert!(a < self.table.len() && b < self.table.len() && a != b);
        let mut out = MultiPoly::zero(&self.table, &self.field);
        for (exps, coeff) in &self.terms {
            let m = exps[a].min(exps[b]);
            let mut e = exps.clone();
            e[a] -= m;
            e[b] -= m;
            out.add_term(e, coeff.clone());
        }
        out
    }

    /// Parses the plain syntax used by the built-in data tables: terms are
    /// separated by `+`/`-`; a term is an optional integer or `n/d` coefficient
    /// followed by variables with optional `^exp`, multiplied implicitly
    /// (whitespace) or with `*`.  Examples: `"0"`, `"- mu nu lambda"`,
    /// `"X122^2 + X123*X132"`, `"2/3 alpha"`.
    pub fn parse(
        table: &Arc<VarTable>,
        field: &FieldDescriptor,
        src: &str,
    ) -> Result<MultiPoly, PolyError> {
        let tokens = tokenize(src)?;
        let mut acc = MultiPoly::zero(table, field);
        let mut i = 0;
        let mut first = true;
        while i < tokens.len() || first {
            let mut sign = 1i64;
            while i < tokens.len() {
                match tokens[i] {
                    Token::Plus => i += 1,
                    Token::Minus => {
                        sign = -sign;
                        i += 1;
                    }
                    _ => break,
                }
            }
            if i >= tokens.len() {
                if first && tokens.is_empty() {
                    return Err(PolyError::Parse("empty input".into()));
                }
                if !first {
                    return Err(PolyError::Parse("dangling sign".into()));
                }
                break;
            }
            first = false;
            let mut coeff = Scalar::from_int(field, sign);
            let mut exps = vec![0u32; table.len()];
            let mut saw_factor = false;
            while i < tokens.len() {
                match &tokens[i] {
                    Token::Star => {
                        i += 1;
                        continue;
                    }
                    Token::Int(n, d) => {
                        let num = Scalar::from_int(field, *n);
                        let c = if *d == 1 {
                            num
                        } else {
                            let den = Scalar::from_int(field, *d);
                            let inv = den.inv().map_err(|_| {
                                PolyError::Parse(format!(
                                    "denominator {d} is zero in {}",
                                    field
                                ))
                            })?;
                            &num * &inv
                        };
                        coeff = &coeff * &c;
                        i += 1;
                        saw_factor = true;
                    }
                    Token::Ident(name) => {
                        let idx = table
                            .index_of(name)
                            .ok_or_else(|| PolyError::UnknownVariable(name.clone()))?;
                        let mut e = 1u32;
                        if i + 1 < tokens.len() && tokens[i + 1] == Token::Caret {
                            match tokens.get(i + 2) {
                                Some(Token::Int(n, 1)) if *n >= 0 => {
                                    e = *n as u32;
                                    i += 2;
                                }
                                _ => {
                                    return Err(PolyError::Parse(
                                        "expected nonnegative integer exponent after ^".into(),
                                    ))
                                }
                            }
                        }
                        exps[idx] += e;
                        i += 1;
                        saw_factor = true;
                    }
                    Token::Plus | Token::Minus => break,
                    Token::Caret => {
                        return Err(PolyError::Parse("unexpected ^".into()));
                    }
                }
            }
            if !saw_factor {
                return Err(PolyError::Parse("empty term".into()));
            }
            acc.add_term(exps, coeff);
        }
        Ok(acc)
    }
}

#[derive(Debug, PartialEq)]
enum Token {
    Ident(String),
    /// Integer literal, possibly written as a fraction n/d (d defaults to 1).
    Int(i64, i64),
    Plus,
    Minus,
    Star,
    Caret,
}

fn tokenize(src: &str) -> Result<Vec<Token>, PolyError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '+' {
            chars.next();
            out.push(Token::Plus);
        } else if c == '-' {
            chars.next();
            out.push(Token::Minus);
        } else if c == '*' {
            chars.next();
            out.push(Token::Star);
        } else if c == '^' {
            chars.next();
            out.push(Token::Caret);
        } else if c.is_ascii_digit() {
            let mut n = 0i64;
            while let Some(d) = chars.peek().and_then(|c| c.to_digit(10)) {
                n = n
                    .checked_mul(10)
                    .and_then(|n| n.checked_add(d as i64))
                    .ok_or_else(|| PolyError::Parse("integer literal overflow".into()))?;
                chars.next();
            }
            let mut den = 1i64;
            if chars.peek() == Some(&'/') {
                chars.next();
                if !chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                    return Err(PolyError::Parse("expected digits after /".into()));
                }
                den = 0;
                while let Some(d) = chars.peek().and_then(|c| c.to_digit(10)) {
                    den = den
                        .checked_mul(10)
                        .and_then(|den| den.checked_add(d as i64))
                        .ok_or_else(|| PolyError::Parse("integer literal overflow".into()))?;
                    chars.next();
                }
                if den == 0 {
                    return Err(PolyError::Parse("zero denominator".into()));
                }
            }
            out.push(Token::Int(n, den));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut name = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    name.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Token::Ident(name));
        } else {
            return Err(PolyError::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

impl std::ops::Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.assert_compatible(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.assert_compatible(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl std::ops::Mul for &MultiPoly {
    type Output = MultiPoly;
    // monomial products add exponent vectors, so `+` inside `mul` is correct
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.assert_compatible(rhs);
        let mut out = MultiPoly::zero(&self.table, &self.field);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let exps: Vec<u32> = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                out.add_term(exps, ca * cb);
            }
        }
        out
    }
}

impl std::ops::Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.table, &self.field);
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), -c);
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (exps, coeff)) in self.terms.iter().enumerate() {
            let negative = match coeff {
                Scalar::Rational(q) => q < &num::BigRational::from_integer(0.into()),
                _ => false,
            };
            let mag = if negative { -coeff } else { coeff.clone() };
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || exps.iter().all(|&e| e == 0) {
                factors.push(mag.to_string());
            }
            for (idx, &e) in exps.iter().enumerate() {
                if e == 1 {
                    factors.push(self.table.name(idx).to_string());
                } else if e > 1 {
                    factors.push(format!("{}^{}", self.table.name(idx), e));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// A total assignment of scalar values to every variable of a table.
#[derive(Clone, Debug)]
pub struct Assignment {
    table: Arc<VarTable>,
    values: Vec<Scalar>,
}

impl Assignment {
    pub fn new(
        table: &Arc<VarTable>,
        pairs: &[(&str, Scalar)],
    ) -> Result<Assignment, PolyError> {
        let mut values: Vec<Option<Scalar>> = vec![None; table.len()];
        for (name, value) in pairs {
            let idx = table
                .index_of(name)
                .ok_or_else(|| PolyError::UnknownVariable((*name).into()))?;
            if values[idx].is_some() {
                return Err(PolyError::DuplicateVariable((*name).into()));
            }
            values[idx] = Some(value.clone());
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| PolyError::MissingVariable(table.name(i).into())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Assignment {
            table: Arc::clone(table),
            values,
        })
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }
}

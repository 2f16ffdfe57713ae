//! Sparse multivariate polynomials over exact rationals.
//!
//! Terms live in a BTreeMap keyed by exponent vectors; the lexicographic key
//! order doubles as the monomial order used by exact division, so the map's
//! last entry is always the leading term.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ipoly::IPoly;
use crate::num::{format_rational, parse_rational, Rational};

#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        assert!(idx < nvars, "variable index out of range");
        let mut exp = vec![0; nvars];
        exp[idx] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(exp, Rational::one());
        p
    }

    /// Integer-coefficient bivariate shorthand: sum of c * x^i * y^j.
    pub fn bivar(terms: &[(i64, u32, u32)]) -> Self {
        let mut p = Self::zero(2);
        for &(c, i, j) in terms {
            p.add_term(vec![i, j], Rational::from_integer(BigInt::from(c)));
        }
        p
    }

    /// Integer-coefficient univariate shorthand: sum of c * x^i.
    pub fn univar(terms: &[(i64, u32)]) -> Self {
        let mut p = Self::zero(1);
        for &(c, i) in terms {
            p.add_term(vec![i], Rational::from_integer(BigInt::from(c)));
        }
        p
    }

    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, Rational)>,
    ) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (exp, c) in terms {
            if exp.len() != nvars {
                return Err(Error::ArityMismatch {
                    expected: nvars,
                    got: exp.len(),
                });
            }
            p.add_term(exp, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, exp: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn coeff(&self, exp: &[u32]) -> Rational {
        self.terms.get(exp).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_constant() {
            Some(self.coeff(&vec![0; self.nvars]))
        } else {
            None
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        let mut out = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            out.terms.insert(e.clone(), v * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, pt: &[Rational]) -> Result<Rational> {
        if pt.len() != self.nvars {
            return Err(Error::ArityMismatch {
                expected: self.nvars,
                got: pt.len(),
            });
        }
        // Cache powers per variable up to the max exponent that occurs.
        let mut powers: Vec<Vec<Rational>> = Vec::with_capacity(self.nvars);
        for (v, x) in pt.iter().enumerate() {
            let maxe = self.degree_in(v) as usize;
            let mut tab = Vec::with_capacity(maxe + 1);
            tab.push(Rational::one());
            for k in 1..=maxe {
                let next = &tab[k - 1] * x;
                tab.push(next);
            }
            powers.push(tab);
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= &powers[v][k as usize];
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn sign_eval(&self, pt: &[Rational]) -> Result<i8> {
        let v = self.eval(pt)?;
        Ok(rational_sign(&v))
    }

    pub fn derivative(&self, var: usize) -> Self {
        assert!(var < self.nvars);
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[var] -= 1;
            out.add_term(ne, c * Rational::from_integer(BigInt::from(e[var])));
        }
        out
    }

    /// Substitutes a rational for one variable; the result has one fewer
    /// variable (indices above `var` shift down).
    pub fn substitute(&self, var: usize, val: &Rational) -> Self {
        assert!(var < self.nvars);
        let maxe = self.degree_in(var) as usize;
        let mut powers = Vec::with_capacity(maxe + 1);
        powers.push(Rational::one());
        for k in 1..=maxe {
            let next = &powers[k - 1] * val;
            powers.push(next);
        }
        let mut out = Self::zero(self.nvars - 1);
        for (e, c) in &self.terms {
            let mut ne = Vec::with_capacity(self.nvars - 1);
            ne.extend_from_slice(&e[..var]);
            ne.extend_from_slice(&e[var + 1..]);
            out.add_term(ne, c * &powers[e[var] as usize]);
        }
        out
    }

    /// Coefficients as polynomials in the remaining variables (exponent in
    /// `var` zeroed), from the leading power down to the constant one.
    pub fn coeffs_desc_in(&self, var: usize) -> Vec<Self> {
        let d = self.degree_in(var) as usize;
        let mut out = vec![Self::zero(self.nvars); d + 1];
        for (e, c) in &self.terms {
            let k = e[var] as usize;
            let mut ne = e.clone();
            ne[var] = 0;
            out[d - k].add_term(ne, c.clone());
        }
        out
    }

    pub fn leading_coeff_in(&self, var: usize) -> Self {
        let d = self.degree_in(var);
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] == d {
                let mut ne = e.clone();
                ne[var] = 0;
                out.add_term(ne, c.clone());
            }
        }
        out
    }

    /// Drops a variable that the polynomial does not actually use.
    pub fn squeeze_var(&self, var: usize) -> Result<Self> {
        if self.degree_in(var) != 0 {
            return Err(Error::malformed(format!(
                "cannot squeeze variable {var}: it occurs with positive degree"
            )));
        }
        let mut out = Self::zero(self.nvars - 1);
        for (e, c) in &self.terms {
            let mut ne = Vec::with_capacity(self.nvars - 1);
            ne.extend_from_slice(&e[..var]);
            ne.extend_from_slice(&e[var + 1..]);
            out.terms.insert(ne, c.clone());
        }
        Ok(out)
    }

    /// Inserts a fresh (unused) variable at `pos`.
    pub fn insert_var(&self, pos: usize) -> Self {
        assert!(pos <= self.nvars);
        let mut out = Self::zero(self.nvars + 1);
        for (e, c) in &self.terms {
            let mut ne = Vec::with_capacity(self.nvars + 1);
            ne.extend_from_slice(&e[..pos]);
            ne.push(0);
            ne.extend_from_slice(&e[pos..]);
            out.terms.insert(ne, c.clone());
        }
        out
    }

    fn leading(&self) -> Option<(&Vec<u32>, &Rational)> {
        self.terms.last_key_value()
    }

    /// Exact division in the polynomial ring; None when the division leaves a
    /// remainder.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        assert_eq!(self.nvars, d.nvars);
        let (dlead_e, dlead_c) = d.leading()?; // None for zero divisor
        let dlead_e = dlead_e.clone();
        let dlead_c = dlead_c.clone();
        let mut r = self.clone();
        let mut q = Self::zero(self.nvars);
        while let Some((rlead_e, rlead_c)) = r.leading() {
            let mut qe = Vec::with_capacity(self.nvars);
            for (a, b) in rlead_e.iter().zip(&dlead_e) {
                if a < b {
                    return None;
                }
                qe.push(a - b);
            }
            let qc = rlead_c / &dlead_c;
            let mut mono = Self::zero(self.nvars);
            mono.terms.insert(qe.clone(), qc.clone());
            r = &r - &(&mono * d);
            q.add_term(qe, qc);
        }
        Some(q)
    }

    /// Clears denominators and the integer content; the lex-leading
    /// coefficient of the result is positive.
    pub fn primitive_int(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            let scaled = c.numer() * (&den_lcm / c.denom());
            num_gcd = num_gcd.gcd(&scaled);
        }
        let mut factor = Rational::new(den_lcm, num_gcd);
        if rational_sign(self.leading().unwrap().1) < 0 {
            factor = -factor;
        }
        self.scale(&factor)
    }
}

pub fn rational_sign(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "arity mismatch in +");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "arity mismatch in -");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "arity mismatch in *");
        let mut out = MultiPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), -c.clone());
        }
        out
    }
}

/// Pseudo-remainder of f by g with respect to `var` (g nonzero in `var`).
/// Returns lc(g)^k * f mod g for some k >= 0; only useful where a positive
/// rescaling is irrelevant (primitive remainder sequences).
pub fn prem_in(f: &MultiPoly, g: &MultiPoly, var: usize) -> MultiPoly {
    let dg = g.degree_in(var);
    assert!(dg > 0, "prem_in divisor must depend on the variable");
    let lc_g = g.leading_coeff_in(var);
    let mut r = f.clone();
    loop {
        if r.is_zero() {
            return r;
        }
        let dr = r.degree_in(var);
        if dr < dg {
            return r;
        }
        let lc_r = r.leading_coeff_in(var);
        let shift = MultiPoly::var(f.nvars(), var).pow(dr - dg);
        r = &(&r * &lc_g) - &(&(&shift * &lc_r) * g);
        debug_assert!(r.is_zero() || r.degree_in(var) < dr);
    }
}

/// Gcd for univariate (nvars 1) or bivariate (nvars 2, main variable = last)
/// polynomials, normalized to primitive integer coefficients with positive
/// leading coefficient.
pub fn gcd_poly(p: &MultiPoly, q: &MultiPoly) -> MultiPoly {
    assert_eq!(p.nvars(), q.nvars());
    if p.is_zero() {
        return q.primitive_int();
    }
    if q.is_zero() {
        return p.primitive_int();
    }
    match p.nvars() {
        1 => {
            let a = IPoly::from_multipoly(p);
            let b = IPoly::from_multipoly(q);
            a.gcd(&b).to_multipoly()
        }
        2 => gcd_bivar(p, q),
        n => panic!("gcd_poly unsupported for {n} variables"),
    }
}

fn gcd_bivar(p: &MultiPoly, q: &MultiPoly) -> MultiPoly {
    let (cont_p, prim_p) = split_content_in(p, 1);
    let (cont_q, prim_q) = split_content_in(q, 1);
    let cont_gcd = gcd_poly(&cont_p.squeeze_var(1).unwrap(), &cont_q.squeeze_var(1).unwrap())
        .insert_var(1);

    let mut f = prim_p;
    let mut g = prim_q;
    if f.degree_in(1) < g.degree_in(1) {
        std::mem::swap(&mut f, &mut g);
    }
    let prim_gcd = loop {
        if g.is_zero() {
            break f;
        }
        if g.degree_in(1) == 0 {
            // Content-free polynomials share no y-dependent factor.
            break MultiPoly::one(2);
        }
        let r = prem_in(&f, &g, 1);
        f = g;
        g = if r.is_zero() {
            MultiPoly::zero(2)
        } else {
            split_content_in(&r, 1).1
        };
    };
    (&cont_gcd * &prim_gcd).primitive_int()
}

/// Splits off the content with respect to `var`: returns (content, primitive)
/// with content free of `var` and p = content * primitive. Bivariate only.
pub fn split_content_in(p: &MultiPoly, var: usize) -> (MultiPoly, MultiPoly) {
    assert_eq!(p.nvars(), 2);
    assert_eq!(var, 1);
    if p.is_zero() {
        return (MultiPoly::one(2), MultiPoly::zero(2));
    }
    let coeffs = p.coeffs_desc_in(var);
    let mut cont = MultiPoly::zero(1);
    for c in &coeffs {
        if c.is_zero() {
            continue;
        }
        cont = gcd_poly(&cont, &c.squeeze_var(1).unwrap());
        if cont.is_constant() {
            break;
        }
    }
    if cont.is_zero() {
        cont = MultiPoly::one(1);
    }
    let cont2 = cont.insert_var(1);
    let prim = p
        .exact_div(&cont2)
        .expect("content must divide the polynomial");
    (cont2, prim.primitive_int())
}

/// Square-free part with respect to `var` (univariate or bivariate input),
/// primitive integer coefficients.
pub fn squarefree_in(p: &MultiPoly, var: usize) -> MultiPoly {
    assert!(!p.is_zero());
    if p.degree_in(var) == 0 {
        return MultiPoly::one(p.nvars());
    }
    let d = p.derivative(var);
    let g = gcd_poly(p, &d);
    if g.is_constant() {
        return p.primitive_int();
    }
    p.exact_div(&g)
        .expect("gcd must divide its argument")
        .primitive_int()
}

/// Resultant with respect to `var`, computed from the Sylvester matrix by
/// fraction-free (Bareiss) elimination. The result does not involve `var`.
pub fn resultant(p: &MultiPoly, q: &MultiPoly, var: usize) -> Result<MultiPoly> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    assert_eq!(p.nvars(), q.nvars());
    let n = p.degree_in(var) as usize;
    let m = q.degree_in(var) as usize;
    if n == 0 && m == 0 {
        return Ok(MultiPoly::one(p.nvars()));
    }
    if n == 0 {
        return Ok(p.pow(m as u32));
    }
    if m == 0 {
        return Ok(q.pow(n as u32));
    }
    let pc = p.coeffs_desc_in(var);
    let qc = q.coeffs_desc_in(var);
    let size = n + m;
    let zero = MultiPoly::zero(p.nvars());
    let mut mat = vec![vec![zero.clone(); size]; size];
    for row in 0..m {
        for (k, c) in pc.iter().enumerate() {
            mat[row][row + k] = c.clone();
        }
    }
    for row in 0..n {
        for (k, c) in qc.iter().enumerate() {
            mat[m + row][row + k] = c.clone();
        }
    }
    Ok(bareiss_det(mat, p.nvars()))
}

fn bareiss_det(mut m: Vec<Vec<MultiPoly>>, nvars: usize) -> MultiPoly {
    let n = m.len();
    let mut sign = 1i8;
    let mut prev = MultiPoly::one(nvars);
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return MultiPoly::zero(nvars);
            };
            m.swap(k, r);
            sign = -sign;
        }
        if k == n - 1 {
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = if num.is_zero() {
                    MultiPoly::zero(nvars)
                } else {
                    num.exact_div(&prev)
                        .expect("Bareiss division must be exact")
                };
            }
            m[i][k] = MultiPoly::zero(nvars);
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -&det
    } else {
        det
    }
}

/// Discriminant with respect to `var`:
/// (-1)^(d(d-1)/2) * res(p, dp/dvar) / lc(p), for deg(p) >= 1.
pub fn discriminant(p: &MultiPoly, var: usize) -> Result<MultiPoly> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let d = p.degree_in(var);
    if d == 0 {
        return Err(Error::out_of_range(
            "discriminant needs positive degree in the chosen variable",
        ));
    }
    if d == 1 {
        return Ok(MultiPoly::one(p.nvars()));
    }
    let res = resultant(p, &p.derivative(var), var)?;
    let lc = p.leading_coeff_in(var);
    let quo = res
        .exact_div(&lc)
        .expect("leading coefficient divides res(p, p')");
    let flip = (d as u64) * (d as u64 - 1) / 2 % 2 == 1;
    Ok(if flip { -&quo } else { quo })
}

// --- serialization: a polynomial is a JSON array of {coef, exp} terms ---

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coef: String,
    exp: Vec<u32>,
}

impl Serialize for MultiPoly {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let reprs: Vec<TermRepr> = self
            .terms
            .iter()
            .map(|(e, c)| TermRepr {
                coef: format_rational(c),
                exp: e.clone(),
            })
            .collect();
        reprs.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let reprs = Vec::<TermRepr>::deserialize(de)?;
        // An empty term list is the zero polynomial; files in this crate are
        // bivariate unless a term says otherwise.
        let nvars = reprs.first().map(|t| t.exp.len()).unwrap_or(2);
        let mut terms = Vec::with_capacity(reprs.len());
        for t in reprs {
            let c = parse_rational(&t.coef).map_err(D::Error::custom)?;
            terms.push((t.exp, c));
        }
        MultiPoly::from_terms(nvars, terms).map_err(D::Error::custom)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let names: Vec<String> = match self.nvars {
            1 => vec!["x".into()],
            2 => vec!["x".into(), "y".into()],
            3 => vec!["x".into(), "y".into(), "z".into()],
            4 => vec!["a".into(), "b".into(), "p1".into(), "p2".into()],
            n => (0..n).map(|i| format!("x{i}")).collect(),
        };
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = rational_sign(c) < 0;
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
                first = false;
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let is_const_term = e.iter().all(|&k| k == 0);
            let show_coef = is_const_term || !mag.is_one();
            if show_coef {
                f.write_str(&format_rational(&mag))?;
            }
            let mut wrote_var = false;
            for (v, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if show_coef || wrote_var {
                    f.write_str("*")?;
                }
                f.write_str(&names[v])?;
                if k > 1 {
                    write!(f, "^{k}")?;
                }
                wrote_var = true;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{rat, rat_i64};

    fn circle() -> MultiPoly {
        // x^2 + y^2 - 1
        MultiPoly::bivar(&[(1, 2, 0), (1, 0, 2), (-1, 0, 0)])
    }

    #[test]
    fn eval_matches_naive_term_sum() {
        let p = MultiPoly::bivar(&[(3, 2, 1), (-5, 0, 3), (7, 1, 1), (2, 0, 0)]);
        let pts = [
            (rat_i64(0), rat_i64(0)),
            (rat_i64(2), rat_i64(-3)),
            (rat(1, 2), rat(-4, 7)),
        ];
        for (x, y) in pts {
            let got = p.eval(&[x.clone(), y.clone()]).unwrap();
            // Independent naive evaluation.
            let mut want = Rational::zero();
            for (e, c) in p.terms() {
                let mut t = c.clone();
                for _ in 0..e[0] {
                    t *= &x;
                }
                for _ in 0..e[1] {
                    t *= &y;
                }
                want += t;
            }
            assert_eq!(got, want);
        }
    }

    #[test]
    fn eval_frozen_examples() {
        let z = rat_i64(0);
        assert_eq!(circle().eval(&[z.clone(), z.clone()]).unwrap(), rat_i64(-1));
        assert_eq!(MultiPoly::zero(2).eval(&[z.clone(), z]).unwrap(), rat_i64(0));
        assert!(circle().eval(&[rat_i64(1)]).is_err());
    }

    #[test]
    fn arithmetic_and_derivative() {
        let x = MultiPoly::var(2, 0);
        let y = MultiPoly::var(2, 1);
        let p = &(&x * &x) + &(&y * &y);
        let p = &p - &MultiPoly::one(2);
        assert_eq!(p, circle());
        assert_eq!(p.derivative(1), MultiPoly::bivar(&[(2, 0, 1)]));
        assert_eq!(p.total_degree(), 2);
        assert_eq!(p.degree_in(0), 2);
        let q = &p * &MultiPoly::zero(2);
        assert!(q.is_zero());
    }

    #[test]
    fn substitute_reindexes() {
        let p = circle();
        let at_x0 = p.substitute(0, &rat_i64(0)); // y^2 - 1, univariate
        assert_eq!(at_x0.nvars(), 1);
        assert_eq!(at_x0, MultiPoly::univar(&[(1, 2), (-1, 0)]));
        let c = at_x0.substitute(0, &rat_i64(3));
        assert_eq!(c.as_constant().unwrap(), rat_i64(8));
    }

    #[test]
    fn exact_division() {
        let p = circle();
        let q = MultiPoly::bivar(&[(1, 1, 1), (2, 0, 0)]);
        let prod = &p * &q;
        assert_eq!(prod.exact_div(&q).unwrap(), p);
        assert_eq!(prod.exact_div(&p).unwrap(), q);
        let not_div = &prod + &MultiPoly::one(2);
        assert!(not_div.exact_div(&q).is_none());
    }

    #[test]
    fn resultant_frozen_examples() {
        // res_y(y - x, y + x) = 2x
        let a = MultiPoly::bivar(&[(1, 0, 1), (-1, 1, 0)]);
        let b = MultiPoly::bivar(&[(1, 0, 1), (1, 1, 0)]);
        let r = resultant(&a, &b, 1).unwrap().squeeze_var(1).unwrap();
        assert_eq!(r, MultiPoly::univar(&[(2, 1)]));

        // res_y(y^2 - x, y) = -x
        let c = MultiPoly::bivar(&[(1, 0, 2), (-1, 1, 0)]);
        let d = MultiPoly::bivar(&[(1, 0, 1)]);
        let r = resultant(&c, &d, 1).unwrap().squeeze_var(1).unwrap();
        assert_eq!(r, MultiPoly::univar(&[(-1, 1)]));
    }

    #[test]
    fn resultant_vanishes_iff_common_root() {
        // Two circles meeting at (0, ±1): res_y should vanish at x = 0.
        let c1 = circle();
        let c2 = MultiPoly::bivar(&[(1, 2, 0), (-2, 1, 0), (1, 0, 2), (-1, 0, 0)]); // (x-1)^2+y^2-2 passes through (0,±1)
        let r = resultant(&c1, &c2, 1).unwrap().squeeze_var(1).unwrap();
        assert_eq!(r.substitute(0, &rat_i64(0)).as_constant().unwrap(), rat_i64(0));
        // And at a generic x with no shared root it must not vanish.
        assert_ne!(r.substitute(0, &rat_i64(5)).as_constant().unwrap(), rat_i64(0));
    }

    #[test]
    fn resultant_multiplicativity() {
        // res(p, q1*q2) = res(p, q1) * res(p, q2)
        let p = MultiPoly::bivar(&[(1, 0, 2), (1, 1, 0), (-3, 0, 0)]);
        let q1 = MultiPoly::bivar(&[(1, 0, 1), (-1, 1, 0)]);
        let q2 = MultiPoly::bivar(&[(2, 0, 1), (1, 2, 0), (1, 0, 0)]);
        let lhs = resultant(&p, &(&q1 * &q2), 1).unwrap();
        let rhs = &resultant(&p, &q1, 1).unwrap() * &resultant(&p, &q2, 1).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn discriminant_frozen_examples() {
        // disc_y(y^2 - x) = 4x
        let p = MultiPoly::bivar(&[(1, 0, 2), (-1, 1, 0)]);
        let d = discriminant(&p, 1).unwrap().squeeze_var(1).unwrap();
        assert_eq!(d, MultiPoly::univar(&[(4, 1)]));
        // disc_y(y^2 + 1) = -4
        let q = MultiPoly::bivar(&[(1, 0, 2), (1, 0, 0)]);
        let d = discriminant(&q, 1).unwrap();
        assert_eq!(d.as_constant().unwrap(), rat_i64(-4));
    }

    #[test]
    fn gcd_and_squarefree() {
        // gcd((y-x)^2 (y+1), (y-x)(y^2+1)) = y - x
        let ymx = MultiPoly::bivar(&[(1, 0, 1), (-1, 1, 0)]);
        let yp1 = MultiPoly::bivar(&[(1, 0, 1), (1, 0, 0)]);
        let y2p1 = MultiPoly::bivar(&[(1, 0, 2), (1, 0, 0)]);
        let a = &(&ymx * &ymx) * &yp1;
        let b = &ymx * &y2p1;
        // Normalization puts the lex-leading coefficient positive: x - y.
        assert_eq!(gcd_poly(&a, &b), (-&ymx).primitive_int());
        assert_eq!(gcd_poly(&a, &b).primitive_int(), gcd_poly(&b, &a));

        // squarefree part of (y-x)^2 (y+1) is (y-x)(y+1)
        let sf = squarefree_in(&a, 1);
        assert_eq!(sf, (&ymx * &yp1).primitive_int());

        // content split: (x^2-1) * y + (x^2-1) has content x^2-1
        let p = MultiPoly::bivar(&[(1, 2, 1), (-1, 0, 1), (1, 2, 0), (-1, 0, 0)]);
        let (cont, prim) = split_content_in(&p, 1);
        assert_eq!(cont, MultiPoly::bivar(&[(1, 2, 0), (-1, 0, 0)]));
        assert_eq!(prim, MultiPoly::bivar(&[(1, 0, 1), (1, 0, 0)]));
    }

    #[test]
    fn primitive_int_normalizes() {
        let p = MultiPoly::from_terms(
            2,
            vec![
                (vec![1, 0], rat(-2, 3)),
                (vec![0, 0], rat(4, 3)),
            ],
        )
        .unwrap();
        // lex-leading term is x; primitive form flips to positive leading.
        assert_eq!(p.primitive_int(), MultiPoly::bivar(&[(1, 1, 0), (-2, 0, 0)]));
    }

    #[test]
    fn serde_roundtrip_and_shape() {
        let p = MultiPoly::from_terms(
            2,
            vec![(vec![2, 0], rat_i64(1)), (vec![0, 0], rat(-1, 2))],
        )
        .unwrap();
        let js = serde_json::to_value(&p).unwrap();
        assert_eq!(
            js,
            serde_json::json!([
                {"coef": "-1/2", "exp": [0, 0]},
                {"coef": "1", "exp": [2, 0]}
            ])
        );
        let back: MultiPoly = serde_json::from_value(js).unwrap();
        assert_eq!(back, p);
        let zero: MultiPoly = serde_json::from_str("[]").unwrap();
        assert!(zero.is_zero());
        assert_eq!(zero.nvars(), 2);
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(circle().to_string(), "x^2 + y^2 - 1");
        assert_eq!(MultiPoly::bivar(&[(-1, 1, 1)]).to_string(), "-x*y");
        assert_eq!(MultiPoly::zero(2).to_string(), "0");
        assert_eq!(
            MultiPoly::from_terms(1, vec![(vec![3], rat(1, 2))]).unwrap().to_string(),
            "1/2*x^3"
        );
    }
}

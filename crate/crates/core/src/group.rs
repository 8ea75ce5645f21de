//! Finite abelian groups `Z_{N_1} x ... x Z_{N_r}`, their characters and the
//! discrete Fourier transform of real functions on them.
//!
//! Elements are addressed two ways: as [`GroupElement`] coordinate vectors and
//! as canonical indices in `0..order`. The index is the mixed-radix value of the
//! coordinates with the first factor most significant, so index order is
//! lexicographic order on coordinates. Every table in the crate uses it.
//!
//! The dual group is identified with the group itself: the character index `a`
//! is a [`GroupElement`] and `chi_a(x) = prod_j exp(2 pi i a_j x_j / N_j)`.
//!
//! The transform here is the naive `O(|G|^2)` sum. Radix splitting per cyclic
//! factor would bring it to `O(|G| sum N_j)` but is not needed at the group
//! orders this crate targets.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

/// Cross-path numeric tolerance (accumulated rounding).
pub const TAU_NUM: f64 = 1e-9;
/// Tolerance for structural identities: Parseval, conjugate symmetry, realness.
pub const TAU_SYM: f64 = 1e-12;

/// Largest group order for which [`GroupArith`] materializes an addition table.
const ADD_TABLE_MAX_ORDER: usize = 1024;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupError {
    #[error("malformed group spec `{0}`: expected factors like `Z4` joined by `x`")]
    Malformed(String),
    #[error("modulus {0} is below 2")]
    ModulusTooSmall(u64),
    #[error("group has no factors")]
    Empty,
    #[error("group order overflows")]
    OrderOverflow,
    #[error("element {0} does not belong to group {1}")]
    Mismatch(GroupElement, AbelianGroup),
    #[error("expected {expected} function values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("function value at index {0} is not finite")]
    NonFinite(usize),
    #[error("inverse transform is not real: imaginary residual {0:e} at index {1}")]
    NotReal(f64, usize),
}

/// `Z_{N_1} x ... x Z_{N_r}` with every `N_j >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    moduli: Vec<u32>,
    order: usize,
}

impl AbelianGroup {
    pub fn new(moduli: Vec<u32>) -> Result<Self, GroupError> {
        if moduli.is_empty() {
            return Err(GroupError::Empty);
        }
        let mut order: usize = 1;
        for &n in &moduli {
            if n < 2 {
                return Err(GroupError::ModulusTooSmall(n as u64));
            }
            order = order
                .checked_mul(n as usize)
                .ok_or(GroupError::OrderOverflow)?;
        }
        Ok(AbelianGroup { moduli, order })
    }

    /// The cyclic group `Z_n`.
    pub fn cyclic(n: u32) -> Result<Self, GroupError> {
        Self::new(vec![n])
    }

    pub fn moduli(&self) -> &[u32] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            coords: vec![0; self.moduli.len()],
        }
    }

    /// Builds an element, reducing each coordinate modulo its factor.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement, GroupError> {
        if coords.len() != self.moduli.len() {
            return Err(GroupError::Mismatch(
                GroupElement {
                    coords: coords.iter().map(|&c| c.max(0) as u32).collect(),
                },
                self.clone(),
            ));
        }
        Ok(GroupElement {
            coords: coords
                .iter()
                .zip(&self.moduli)
                .map(|(&c, &n)| c.rem_euclid(n as i64) as u32)
                .collect(),
        })
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.coords.len() == self.moduli.len()
            && g.coords.iter().zip(&self.moduli).all(|(&c, &n)| c < n)
    }

    fn check(&self, g: &GroupElement) -> Result<(), GroupError> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(GroupError::Mismatch(g.clone(), self.clone()))
        }
    }

    pub fn add(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(g)?;
        self.check(h)?;
        Ok(GroupElement {
            coords: g
                .coords
                .iter()
                .zip(&h.coords)
                .zip(&self.moduli)
                .map(|((&a, &b), &n)| ((a as u64 + b as u64) % n as u64) as u32)
                .collect(),
        })
    }

    pub fn negate(&self, g: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check(g)?;
        Ok(GroupElement {
            coords: g
                .coords
                .iter()
                .zip(&self.moduli)
                .map(|(&a, &n)| if a == 0 { 0 } else { n - a })
                .collect(),
        })
    }

    pub fn sub(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement, GroupError> {
        let minus_h = self.negate(h)?;
        self.add(g, &minus_h)
    }

    /// Canonical mixed-radix index of `g`.
    pub fn index_of(&self, g: &GroupElement) -> Result<usize, GroupError> {
        self.check(g)?;
        Ok(g.coords
            .iter()
            .zip(&self.moduli)
            .fold(0usize, |acc, (&c, &n)| acc * n as usize + c as usize))
    }

    /// Element with canonical index `idx`. Panics if `idx >= order`.
    pub fn element_at(&self, idx: usize) -> GroupElement {
        assert!(idx < self.order, "index {idx} out of range for {self}");
        let mut coords = vec![0u32; self.moduli.len()];
        let mut rest = idx;
        for (slot, &n) in coords.iter_mut().zip(&self.moduli).rev() {
            *slot = (rest % n as usize) as u32;
            rest /= n as usize;
        }
        GroupElement { coords }
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order).map(move |i| self.element_at(i))
    }

    /// Least common multiple of the moduli: the exponent of the group.
    pub fn exponent(&self) -> u64 {
        self.moduli.iter().fold(1u64, |acc, &n| lcm(acc, n as u64))
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.moduli.iter().enumerate() {
            if i > 0 {
                f.write_str("x")?;
            }
            write!(f, "Z{n}")?;
        }
        Ok(())
    }
}

impl FromStr for AbelianGroup {
    type Err = GroupError;

    /// Parses `Z<N>(xZ<N>)*`, e.g. `Z4` or `Z2xZ2xZ3`. The `Z` is case-insensitive.
    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let malformed = || GroupError::Malformed(spec.to_string());
        if spec.is_empty() {
            return Err(malformed());
        }
        let mut moduli = Vec::new();
        for token in spec.split(['x', 'X']) {
            let digits = token
                .strip_prefix('Z')
                .or_else(|| token.strip_prefix('z'))
                .ok_or_else(malformed)?;
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(malformed());
            }
            let n: u64 = digits.parse().map_err(|_| malformed())?;
            if n < 2 {
                return Err(GroupError::ModulusTooSmall(n));
            }
            moduli.push(u32::try_from(n).map_err(|_| GroupError::OrderOverflow)?);
        }
        AbelianGroup::new(moduli)
    }
}

/// A group element in canonical (reduced) coordinates. Also used as a character index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    coords: Vec<u32>,
}

impl GroupElement {
    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let [c] = self.coords.as_slice() {
            return write!(f, "{c}");
        }
        f.write_str("(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Index-level arithmetic for hot loops. Small groups get a full addition table.
#[derive(Debug, Clone)]
pub struct GroupArith {
    group: AbelianGroup,
    neg: Vec<u32>,
    add: Option<Vec<u32>>,
}

impl GroupArith {
    pub fn new(group: &AbelianGroup) -> Self {
        let order = group.order();
        let neg = (0..order)
            .map(|i| Self::digit_neg(group, i) as u32)
            .collect();
        let add = (order <= ADD_TABLE_MAX_ORDER).then(|| {
            let mut table = Vec::with_capacity(order * order);
            for a in 0..order {
                for b in 0..order {
                    table.push(Self::digit_add(group, a, b) as u32);
                }
            }
            table
        });
        GroupArith {
            group: group.clone(),
            neg,
            add,
        }
    }

    fn digit_add(group: &AbelianGroup, mut a: usize, mut b: usize) -> usize {
        let mut out = 0usize;
        let mut place = 1usize;
        for &n in group.moduli.iter().rev() {
            let n = n as usize;
            let d = (a % n + b % n) % n;
            out += d * place;
            place *= n;
            a /= n;
            b /= n;
        }
        out
    }

    fn digit_neg(group: &AbelianGroup, mut a: usize) -> usize {
        let mut out = 0usize;
        let mut place = 1usize;
        for &n in group.moduli.iter().rev() {
            let n = n as usize;
            let d = (n - a % n) % n;
            out += d * place;
            place *= n;
            a /= n;
        }
        out
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.group.order
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        match &self.add {
            Some(table) => table[a * self.group.order + b] as usize,
            None => Self::digit_add(&self.group, a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        self.neg[a] as usize
    }

    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// `acc + sign * x` for `sign` in {-1, 0, 1}.
    #[inline]
    pub fn add_signed(&self, acc: usize, sign: i8, x: usize) -> usize {
        match sign {
            0 => acc,
            1 => self.add(acc, x),
            -1 => self.sub(acc, x),
            _ => unreachable!("coefficient {sign} outside {{-1,0,1}}"),
        }
    }
}

/// Phases `chi_a(x) = exp(2 pi i t / E)` with `E` the group exponent, tabulated once.
///
/// The table satisfies `root(E - t) == conj(root(t))` bit for bit, which makes
/// conjugate symmetry of transforms of real functions exact.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    group: AbelianGroup,
    exponent: u64,
    /// `E / N_j` per factor.
    scale: Vec<u64>,
    roots: Vec<Complex64>,
    digits: Vec<u32>,
}

impl CharacterTable {
    pub fn new(group: &AbelianGroup) -> Self {
        let exponent = group.exponent();
        let scale = group.moduli.iter().map(|&n| exponent / n as u64).collect();
        let e = exponent as usize;
        let mut roots = vec![Complex64::new(0.0, 0.0); e];
        for (t, root) in roots.iter_mut().enumerate().take(e / 2 + 1) {
            let angle = std::f64::consts::TAU * t as f64 / exponent as f64;
            let (s, c) = angle.sin_cos();
            *root = Complex64::new(c, s);
        }
        for t in e / 2 + 1..e {
            roots[t] = roots[e - t].conj();
        }
        // Quarter turns exactly.
        if e.is_multiple_of(4) {
            roots[e / 4] = Complex64::new(0.0, 1.0);
            roots[3 * e / 4] = Complex64::new(0.0, -1.0);
        }
        if e.is_multiple_of(2) {
            roots[e / 2] = Complex64::new(-1.0, 0.0);
        }
        let r = group.rank();
        let mut digits = Vec::with_capacity(group.order() * r);
        for g in group.elements() {
            digits.extend_from_slice(g.coords());
        }
        CharacterTable {
            group: group.clone(),
            exponent,
            scale,
            roots,
            digits,
        }
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    /// Phase numerator `t` with `chi_a(x) = exp(2 pi i t / E)`, by canonical indices.
    #[inline]
    pub fn phase(&self, a: usize, x: usize) -> usize {
        let r = self.scale.len();
        let da = &self.digits[a * r..(a + 1) * r];
        let dx = &self.digits[x * r..(x + 1) * r];
        let mut t = 0u64;
        for j in 0..r {
            let n = self.group.moduli[j] as u64;
            t += (da[j] as u64 * dx[j] as u64 % n) * self.scale[j];
        }
        (t % self.exponent) as usize
    }

    #[inline]
    pub fn value(&self, a: usize, x: usize) -> Complex64 {
        self.roots[self.phase(a, x)]
    }
}

/// `chi_a(x)`.
pub fn character_value(
    group: &AbelianGroup,
    a: &GroupElement,
    x: &GroupElement,
) -> Result<Complex64, GroupError> {
    let ia = group.index_of(a)?;
    let ix = group.index_of(x)?;
    Ok(CharacterTable::new(group).value(ia, ix))
}

/// A real-valued function on a group, one value per canonical index.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupFunction {
    group: AbelianGroup,
    values: Vec<f64>,
}

impl GroupFunction {
    pub fn new(group: &AbelianGroup, values: Vec<f64>) -> Result<Self, GroupError> {
        if values.len() != group.order() {
            return Err(GroupError::WrongLength {
                expected: group.order(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(GroupError::NonFinite(i));
        }
        Ok(GroupFunction {
            group: group.clone(),
            values,
        })
    }

    /// Indicator of the elements whose canonical index is flagged in `mask`.
    pub fn indicator(group: &AbelianGroup, mask: &[bool]) -> Result<Self, GroupError> {
        Self::new(
            group,
            mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        )
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.group.order() as f64
    }
}

/// Fourier coefficients `f^(a) = E_x f(x) conj(chi_a(x))`, indexed canonically by `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierTable {
    group: AbelianGroup,
    coefficients: Vec<Complex64>,
}

impl FourierTable {
    pub fn from_coefficients(
        group: &AbelianGroup,
        coefficients: Vec<Complex64>,
    ) -> Result<Self, GroupError> {
        if coefficients.len() != group.order() {
            return Err(GroupError::WrongLength {
                expected: group.order(),
                got: coefficients.len(),
            });
        }
        Ok(FourierTable {
            group: group.clone(),
            coefficients,
        })
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    #[inline]
    pub fn at(&self, idx: usize) -> Complex64 {
        self.coefficients[idx]
    }

    pub fn coefficient(&self, a: &GroupElement) -> Result<Complex64, GroupError> {
        Ok(self.coefficients[self.group.index_of(a)?])
    }

    /// `f^(0)`, the mean of the source function.
    pub fn principal(&self) -> Complex64 {
        self.coefficients[0]
    }

    /// Largest `|f^(a) - conj(f^(-a))|`; zero for transforms of real functions.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let arith = GroupArith::new(&self.group);
        (0..self.group.order())
            .map(|a| (self.coefficients[a] - self.coefficients[arith.neg(a)].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// `max_{a != 0} |f^(a)|`, or 0 for the trivial character set.
    pub fn max_nonprincipal_modulus(&self) -> f64 {
        self.coefficients[1..]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

/// Naive transform. Each coefficient sums over `x` in canonical order, so results are
/// bit-identical regardless of how many threads compute the coefficients.
pub fn fourier_transform(f: &GroupFunction) -> FourierTable {
    let group = &f.group;
    let order = group.order();
    let chars = CharacterTable::new(group);
    let norm = order as f64;
    let coefficients = (0..order)
        .into_par_iter()
        .map(|a| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, &v) in f.values.iter().enumerate() {
                if v != 0.0 {
                    acc += chars.value(a, x).conj() * v;
                }
            }
            acc / norm
        })
        .collect();
    FourierTable {
        group: group.clone(),
        coefficients,
    }
}

/// Complex values produced by Fourier inversion.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexFunction {
    group: AbelianGroup,
    values: Vec<Complex64>,
}

impl ComplexFunction {
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Drops imaginary parts after checking they are below `tol`.
    pub fn into_real(self, tol: f64) -> Result<GroupFunction, GroupError> {
        if let Some((i, v)) = self
            .values
            .iter()
            .enumerate()
            .find(|(_, v)| v.im.is_nan() || v.im.abs() > tol)
        {
            return Err(GroupError::NotReal(v.im, i));
        }
        GroupFunction::new(&self.group, self.values.iter().map(|v| v.re).collect())
    }
}

/// `f(x) = sum_a f^(a) chi_a(x)`.
pub fn inverse_transform(table: &FourierTable) -> ComplexFunction {
    let group = &table.group;
    let chars = CharacterTable::new(group);
    let values = (0..group.order())
        .into_par_iter()
        .map(|x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, &c) in table.coefficients.iter().enumerate() {
                acc += c * chars.value(a, x);
            }
            acc
        })
        .collect();
    ComplexFunction {
        group: group.clone(),
        values,
    }
}

//! Dirichlet characters modulo `q`.
//!
//! The unit group (Z/qZ)* is split by CRT into cyclic factors with standard
//! generators: the smallest primitive root for each odd prime power, `-1` for
//! `4`, and `{-1, 5}` for `2^k` with `k >= 3`. A character is an exponent
//! vector `a` with `chi(g_i) = e(a_i / ord_i)`; characters are ordered
//! lexicographically by that vector, so index 1 is the principal character.
//!
//! Values are kept as exact roots of unity (`Root`), with a floating-point
//! table alongside for evaluation.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, factorize, gcd, lcm, mod_pow, totient};
use crate::error::{Error, Result};

/// The root of unity `exp(2 pi i num / den)`, in lowest terms with `num < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Root {
    pub num: u64,
    pub den: u64,
}

impl Root {
    pub const ONE: Root = Root { num: 0, den: 1 };

    pub fn new(num: u64, den: u64) -> Root {
        assert!(den > 0);
        let num = num % den;
        if num == 0 {
            return Root::ONE;
        }
        let g = gcd(num, den);
        Root {
            num: num / g,
            den: den / g,
        }
    }

    pub fn mul(self, other: Root) -> Root {
        let den = lcm(self.den, other.den);
        Root::new(self.num * (den / self.den) + other.num * (den / other.den), den)
    }

    pub fn conj(self) -> Root {
        Root::new(self.den - self.num, self.den)
    }

    pub fn pow(self, k: u64) -> Root {
        Root::new(((self.num as u128 * k as u128) % self.den as u128) as u64, self.den)
    }

    /// Floating-point value; quarter turns are exact and `conj` maps to the
    /// bitwise complex conjugate.
    pub fn to_complex(self) -> Complex64 {
        match (self.num, self.den) {
            (0, _) => Complex64::new(1.0, 0.0),
            (1, 2) => Complex64::new(-1.0, 0.0),
            (1, 4) => Complex64::new(0.0, 1.0),
            (3, 4) => Complex64::new(0.0, -1.0),
            (n, d) => {
                if 2 * n > d {
                    let a = 2.0 * PI * (d - n) as f64 / d as f64;
                    Complex64::new(a.cos(), -a.sin())
                } else {
                    let a = 2.0 * PI * n as f64 / d as f64;
                    Complex64::new(a.cos(), a.sin())
                }
            }
        }
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.num, self.den) {
            (0, _) => write!(f, "1"),
            (1, 2) => write!(f, "-1"),
            (n, d) => write!(f, "e({n}/{d})"),
        }
    }
}

/// One cyclic factor of (Z/qZ)*.
#[derive(Debug, Clone)]
struct Component {
    prime_power: u64,
    order: u64,
    /// Discrete log of each residue mod `prime_power` (None for non-units).
    dlog: Vec<Option<u64>>,
    /// Residue mod q that is the generator here and 1 in every other factor.
    lift: u64,
}

#[derive(Debug, Clone)]
struct Group {
    modulus: u64,
    components: Vec<Component>,
}

fn multiplicative_order(g: u64, modulus: u64, group_order: u64) -> u64 {
    let mut order = group_order;
    for (p, _) in factorize(group_order) {
        while order % p == 0 && mod_pow(g, order / p, modulus) == 1 {
            order /= p;
        }
    }
    order
}

fn cyclic_dlog(generator: u64, modulus: u64, order: u64) -> Vec<Option<u64>> {
    let mut table = vec![None; modulus as usize];
    let mut x = 1 % modulus;
    for e in 0..order {
        table[x as usize] = Some(e);
        x = x * generator % modulus;
    }
    table
}

fn crt_lift(residue: u64, prime_power: u64, modulus: u64) -> u64 {
    let rest = modulus / prime_power;
    let mut n = residue % prime_power;
    while n % rest != 1 % rest {
        n += prime_power;
    }
    n
}

impl Group {
    fn new(modulus: u64) -> Group {
        let mut components = Vec::new();
        for (p, k) in factorize(modulus) {
            let pk = p.pow(k);
            if p == 2 {
                if k == 1 {
                    continue;
                }
                // -1 generates the sign part; for k >= 3, 5 generates the rest.
                let sign = (0..pk)
                    .map(|r| match r % 4 {
                        1 => Some(0),
                        3 => Some(1),
                        _ => None,
                    })
                    .collect();
                components.push(Component {
                    prime_power: pk,
                    order: 2,
                    dlog: sign,
                    lift: crt_lift(pk - 1, pk, modulus),
                });
                if k >= 3 {
                    let order = pk / 4;
                    let fives = cyclic_dlog(5, pk, order);
                    let dlog = (0..pk)
                        .map(|r| {
                            if r % 2 == 0 {
                                None
                            } else if r % 4 == 1 {
                                fives[r as usize]
                            } else {
                                fives[(pk - r) as usize]
                            }
                        })
                        .collect();
                    components.push(Component {
                        prime_power: pk,
                        order,
                        dlog,
                        lift: crt_lift(5, pk, modulus),
                    });
                }
            } else {
                let order = pk / p * (p - 1);
                let g = (2..pk)
                    .find(|&g| gcd(g, p) == 1 && multiplicative_order(g, pk, order) == order)
                    .expect("odd prime powers have primitive roots");
                components.push(Component {
                    prime_power: pk,
                    order,
                    dlog: cyclic_dlog(g, pk, order),
                    lift: crt_lift(g, pk, modulus),
                });
            }
        }
        Group {
            modulus,
            components,
        }
    }

    fn order(&self) -> u64 {
        self.components.iter().map(|c| c.order).product()
    }

    fn orders(&self) -> Vec<u64> {
        self.components.iter().map(|c| c.order).collect()
    }

    fn exponents_of_index(&self, index: usize) -> Vec<u64> {
        let mut rem = (index - 1) as u64;
        let mut exps = vec![0; self.components.len()];
        for (i, c) in self.components.iter().enumerate().rev() {
            exps[i] = rem % c.order;
            rem /= c.order;
        }
        exps
    }

    fn index_of_exponents(&self, exps: &[u64]) -> usize {
        let mut idx = 0u64;
        for (c, &a) in self.components.iter().zip(exps) {
            idx = idx * c.order + a;
        }
        idx as usize + 1
    }

    fn character(&self, index: usize) -> DirichletCharacter {
        let exponents = self.exponents_of_index(index);
        let q = self.modulus;
        let roots: Vec<Option<Root>> = (0..q)
            .map(|n| {
                if gcd(n, q) != 1 {
                    return None;
                }
                let mut r = Root::ONE;
                for (c, &a) in self.components.iter().zip(&exponents) {
                    let e = c.dlog[(n % c.prime_power) as usize].expect("unit residue");
                    r = r.mul(Root::new(a * e % c.order, c.order));
                }
                Some(r)
            })
            .collect();
        DirichletCharacter::from_parts(q, index, exponents, self.orders(), roots)
    }

    /// Identify the character whose value table is `roots`, if any.
    fn identify(&self, roots: &[Option<Root>]) -> Option<DirichletCharacter> {
        let mut exps = Vec::with_capacity(self.components.len());
        for c in &self.components {
            let r = roots[c.lift as usize]?;
            // r must be an ord-th root of unity: r = a / ord
            if (r.num * c.order) % r.den != 0 {
                return None;
            }
            exps.push(r.num * c.order / r.den);
        }
        let chi = self.character(self.index_of_exponents(&exps));
        (chi.roots == roots).then_some(chi)
    }
}

/// A Dirichlet character mod `q`, immutable after construction.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    modulus: u64,
    index: usize,
    exponents: Vec<u64>,
    orders: Vec<u64>,
    roots: Vec<Option<Root>>,
    values: Vec<Complex64>,
    support: Vec<(u64, Complex64)>,
    conductor: u64,
    parity: u8,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.roots == other.roots
    }
}

impl Eq for DirichletCharacter {}

/// All `phi(q)` characters mod `q` in canonical order (index 1 first).
pub fn enumerate_characters(q: u64) -> Vec<DirichletCharacter> {
    assert!(q >= 1, "modulus must be positive");
    let group = Group::new(q);
    (1..=group.order() as usize).map(|j| group.character(j)).collect()
}

impl DirichletCharacter {
    /// The `index`-th character mod `q`, `1 <= index <= phi(q)`.
    pub fn new(q: u64, index: usize) -> Result<DirichletCharacter> {
        if q == 0 {
            return Err(Error::InvalidArgument("modulus must be >= 1".into()));
        }
        let phi = totient(q) as usize;
        if index == 0 || index > phi {
            return Err(Error::InvalidArgument(format!(
                "index {index} out of range 1..={phi} for modulus {q}"
            )));
        }
        Ok(Group::new(q).character(index))
    }

    pub fn principal(q: u64) -> DirichletCharacter {
        Group::new(q).character(1)
    }

    /// Build the character mod `q` with the given exact values on units.
    /// Fails if `f` does not define a character.
    pub fn from_roots(q: u64, f: impl Fn(u64) -> Root) -> Result<DirichletCharacter> {
        let roots: Vec<Option<Root>> = (0..q)
            .map(|n| (gcd(n, q) == 1).then(|| f(n)))
            .collect();
        Group::new(q)
            .identify(&roots)
            .ok_or_else(|| Error::InvalidArgument(format!("table is not a character mod {q}")))
    }

    fn from_parts(
        modulus: u64,
        index: usize,
        exponents: Vec<u64>,
        orders: Vec<u64>,
        roots: Vec<Option<Root>>,
    ) -> DirichletCharacter {
        let values: Vec<Complex64> = roots
            .iter()
            .map(|r| r.map_or(Complex64::new(0.0, 0.0), Root::to_complex))
            .collect();
        let support = values
            .iter()
            .enumerate()
            .filter(|(n, _)| roots[*n].is_some())
            .map(|(n, v)| (n as u64, *v))
            .collect();
        let conductor = conductor_of(modulus, &roots);
        let minus_one = roots[((modulus - 1) % modulus) as usize].expect("-1 is a unit");
        let parity = u8::from(minus_one != Root::ONE);
        DirichletCharacter {
            modulus,
            index,
            exponents,
            orders,
            roots,
            values,
            support,
            conductor,
            parity,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// Exponent vector with respect to the canonical generators.
    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus
    }

    /// `kappa`: 0 for even characters, 1 for odd.
    pub fn parity(&self) -> u8 {
        self.parity
    }

    pub fn is_principal(&self) -> bool {
        self.index == 1
    }

    pub fn is_real(&self) -> bool {
        self.roots.iter().flatten().all(|r| r.den <= 2)
    }

    /// Order of the character in the character group.
    pub fn order(&self) -> u64 {
        self.roots.iter().flatten().fold(1, |acc, r| lcm(acc, r.den))
    }

    pub fn root(&self, n: i64) -> Option<Root> {
        self.roots[n.rem_euclid(self.modulus as i64) as usize]
    }

    pub fn value(&self, n: i64) -> Complex64 {
        self.values[n.rem_euclid(self.modulus as i64) as usize]
    }

    pub fn value_u(&self, n: u64) -> Complex64 {
        self.values[(n % self.modulus) as usize]
    }

    /// Residues `0 <= a < q` with nonzero value, paired with the value.
    pub fn support(&self) -> &[(u64, Complex64)] {
        &self.support
    }

    /// Exact value table indexed by residue.
    pub fn roots(&self) -> &[Option<Root>] {
        &self.roots
    }

    /// `tau(chi) = sum_{a=1}^{q} chi(a) e^{2 pi i a / q}`.
    pub fn gauss_sum(&self) -> Complex64 {
        let q = self.modulus;
        (1..=q)
            .filter_map(|a| {
                let r = self.roots[(a % q) as usize]?;
                Some(r.mul(Root::new(a, q)).to_complex())
            })
            .sum()
    }

    pub fn conjugate(&self) -> DirichletCharacter {
        let exps: Vec<u64> = self
            .exponents
            .iter()
            .zip(&self.orders)
            .map(|(&a, &o)| (o - a) % o)
            .collect();
        let group = Group::new(self.modulus);
        group.character(group.index_of_exponents(&exps))
    }

    /// The character mod `q` induced by `self`: equal to `self` on residues
    /// coprime to `q`, zero elsewhere.
    pub fn induce(&self, q: u64) -> Result<DirichletCharacter> {
        if q == 0 || q % self.modulus != 0 {
            return Err(Error::InvalidArgument(format!(
                "modulus {} does not divide {q}",
                self.modulus
            )));
        }
        let roots: Vec<Option<Root>> = (0..q)
            .map(|n| {
                if gcd(n, q) == 1 {
                    self.roots[(n % self.modulus) as usize]
                } else {
                    None
                }
            })
            .collect();
        Ok(Group::new(q)
            .identify(&roots)
            .expect("an induced table is always a character"))
    }

    /// The primitive character mod `conductor()` that induces `self`.
    pub fn primitive_inducer(&self) -> DirichletCharacter {
        let d = self.conductor;
        enumerate_characters(d)
            .into_iter()
            .find(|star| star.induce(self.modulus).map_or(false, |c| &c == self))
            .expect("conductor always admits an inducing character")
    }

    /// Pointwise product of two characters with the same modulus.
    pub fn product(&self, other: &DirichletCharacter) -> Result<DirichletCharacter> {
        if self.modulus != other.modulus {
            return Err(Error::InvalidArgument("moduli differ".into()));
        }
        let q = self.modulus;
        DirichletCharacter::from_roots(q, |n| {
            self.roots[n as usize]
                .expect("unit")
                .mul(other.roots[n as usize].expect("unit"))
        })
    }
}

/// Smallest `d | q` such that `chi(n)` depends only on `n mod d` for `n`
/// coprime to `q`; exactly the moduli admitting an inducing character.
fn conductor_of(q: u64, roots: &[Option<Root>]) -> u64 {
    for d in divisors(q) {
        let mut seen: Vec<Option<Root>> = vec![None; d as usize];
        let constant = (0..q).all(|n| match roots[n as usize] {
            None => true,
            Some(r) => {
                let slot = &mut seen[(n % d) as usize];
                match slot {
                    None => {
                        *slot = Some(r);
                        true
                    }
                    Some(prev) => *prev == r,
                }
            }
        });
        if constant {
            return d;
        }
    }
    q
}

/// Checks the defining axioms and elementary properties exhaustively over
/// all residues (and all residue pairs): periodicity, vanishing exactly off
/// the units, exact multiplicativity, `chi(1) = 1`, `chi(a) = chi(b)` for
/// `a = b mod q`, `chi(a)^phi(q) = 1` and the parity flag. Returns the
/// first violation.
pub fn verify_axioms(chi: &DirichletCharacter) -> std::result::Result<(), String> {
    let q = chi.modulus();
    let qi = q as i64;
    let phi = totient(q);
    for n in 0..q {
        let r = chi.root(n as i64);
        if r.is_some() != (gcd(n, q) == 1) {
            return Err(format!("chi({n}) should vanish iff gcd({n}, {q}) > 1"));
        }
        for k in [-2i64, -1, 1, 3] {
            if chi.root(n as i64 + k * qi) != r || chi.value(n as i64 + k * qi) != chi.value(n as i64) {
                return Err(format!("chi({n}) is not {q}-periodic"));
            }
        }
        if let Some(r) = r {
            if r.pow(phi) != Root::ONE {
                return Err(format!("chi({n}) = {r} is not a root of order phi({q})"));
            }
            if (chi.value(n as i64).powu(phi as u32) - 1.0).norm() >= 1e-12 {
                return Err(format!("chi({n})^phi({q}) drifts from 1 in floating point"));
            }
        }
        for m in 0..q {
            let prod = match (chi.root(m as i64), r) {
                (Some(a), Some(b)) => Some(a.mul(b)),
                _ => None,
            };
            if chi.root((m * n % q) as i64) != prod {
                return Err(format!("chi({m} * {n}) != chi({m}) chi({n})"));
            }
        }
    }
    if chi.root(1) != Some(Root::ONE) {
        return Err("chi(1) != 1".into());
    }
    let minus_one_is_one = chi.root(-1) == Some(Root::ONE);
    if (chi.parity() == 0) != minus_one_is_one {
        return Err(format!("parity {} disagrees with chi(-1)", chi.parity()));
    }
    Ok(())
}

//! The kernel X_{T,T′} and the polynomial M(A|S) for mixed matrix elements, with
//! exact polynomiality certification.
//!
//! Indices are 0-based internally: rapidities B_0…B_{2n−1}, T_0…T_{2m−1}; T ⊂ {0…2n−1}
//! is `t`, T′ ⊂ {0…2m−1} is `tp`. Variables are named A1…A_{n−1}, S1…S_{m−1}.

use super::gauss::GaussQ;
use super::laurent::LaurentPoly;
use super::upoly::{Deg, Frac, Scalar, UPoly};
use crate::report::{rng, CheckReport};
use crate::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

/// Largest n + m accepted by the subset enumeration.
pub const DEFAULT_CAP: usize = 7;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetPair {
    pub n: usize,
    pub m: usize,
    pub t: Vec<usize>,
    pub tp: Vec<usize>,
}

impl SubsetPair {
    pub fn new(n: usize, m: usize, mut t: Vec<usize>, mut tp: Vec<usize>) -> Result<Self> {
        t.sort_unstable();
        tp.sort_unstable();
        let ok = |v: &[usize], size: usize, range: usize| v.len() == size && v.windows(2).all(|w| w[0] < w[1]) && v.iter().all(|&k| k < range);
        if n == 0 || m == 0 || !ok(&t, n - 1, 2 * n) || !ok(&tp, m - 1, 2 * m) {
            return Err(Error::Parameter(format!("subset pair T = {t:?}, T' = {tp:?} invalid for n = {n}, m = {m}")));
        }
        Ok(Self { n, m, t, tp })
    }

    /// S∖T
    pub fn complement(&self) -> Vec<usize> {
        (0..2 * self.n).filter(|k| !self.t.contains(k)).collect()
    }

    /// S′∖T′
    pub fn complement_prime(&self) -> Vec<usize> {
        (0..2 * self.m).filter(|k| !self.tp.contains(k)).collect()
    }

    /// All pairs with #T = n−1, #T′ = m−1.
    pub fn all(n: usize, m: usize) -> Result<Vec<Self>> {
        if n == 0 || m == 0 {
            return Err(Error::Parameter("n, m ≥ 1".into()));
        }
        let ts = combinations(2 * n, n - 1);
        let tps = combinations(2 * m, m - 1);
        let mut out = Vec::with_capacity(ts.len() * tps.len());
        for t in &ts {
            for tp in &tps {
                out.push(Self { n, m, t: t.clone(), tp: tp.clone() });
            }
        }
        Ok(out)
    }
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Which index set the B–B denominators of X run over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DenominatorReading {
    /// j ∈ S∖T∖{i₁,i₂}
    SComplement,
    /// j ∈ S′∖T′∖{i₁,i₂}, applied to B indices directly
    SPrimeComplement,
}

/// Whether the double sum over i₁, i₂ includes the diagonal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairReading {
    Ordered,
    Distinct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelReading {
    pub denominators: DenominatorReading,
    pub pairs: PairReading,
}

impl Default for KernelReading {
    fn default() -> Self {
        Self { denominators: DenominatorReading::SComplement, pairs: PairReading::Ordered }
    }
}

fn i_times<F: Scalar>(x: &F) -> F {
    F::konst(GaussQ::i()).mul(x)
}

/// The double sum term by term, for any index sets (generic so it also runs on
/// rational functions of one variable).
pub fn x_kernel_generic<F: Scalar>(
    comp: &[usize],
    t: &[usize],
    tp: &[usize],
    tpc: &[usize],
    b: &[F],
    tv: &[F],
    reading: KernelReading,
) -> Result<F> {
    let den_set: &[usize] = match reading.denominators {
        DenominatorReading::SComplement => comp,
        DenominatorReading::SPrimeComplement => tpc,
    };
    if den_set.iter().chain(t).chain(comp).any(|&j| j >= b.len()) || tp.iter().chain(tpc).any(|&j| j >= tv.len()) {
        return Err(Error::OutOfRange("kernel index outside the rapidity lists".into()));
    }
    let mut acc = F::konst(GaussQ::zero());
    for &i1 in comp {
        for &i2 in comp {
            if reading.pairs == PairReading::Distinct && i1 == i2 {
                continue;
            }
            let mut x = F::konst(GaussQ::one());
            for ip in [i1, i2] {
                let bi = &b[ip];
                for &j in t {
                    x = x.mul(&bi.add(&b[j]));
                }
                for &j in tp {
                    x = x.mul(&bi.add(&i_times(&tv[j])));
                }
                for &j in den_set {
                    if j != i1 && j != i2 {
                        x = x.div(&bi.sub(&b[j]))?;
                    }
                }
                for &j in tpc {
                    x = x.div(&bi.sub(&i_times(&tv[j])))?;
                }
            }
            acc = acc.add(&x);
        }
    }
    Ok(acc)
}

/// Brute-force X_{T,T′}: the defining double sum.
pub fn x_kernel_brute(pair: &SubsetPair, b: &[GaussQ], tv: &[GaussQ], reading: KernelReading) -> Result<GaussQ> {
    check_lengths(pair.n, pair.m, b, tv)?;
    x_kernel_generic(&pair.complement(), &pair.t, &pair.tp, &pair.complement_prime(), b, tv, reading)
}

fn check_lengths(n: usize, m: usize, b: &[GaussQ], tv: &[GaussQ]) -> Result<()> {
    if b.len() != 2 * n || tv.len() != 2 * m {
        return Err(Error::Dimension(format!("need {} B and {} T values, got {} and {}", 2 * n, 2 * m, b.len(), tv.len())));
    }
    Ok(())
}

/// X over an arbitrary complement set, through the moments of
/// g_i = N_i / (∏_{j∈comp∖i}(B_i−B_j) ∏_{j∈S′∖T′}(B_i−iT_j)).
///
/// For i₁ ≠ i₂ the summand is −g₁g₂(B₁−B₂)², on the diagonal g_i², so
/// X = Σg² − 2(Σg)(ΣgB²) + 2(ΣgB)² (ordered) and X − Σg² (distinct pairs).
pub fn x_kernel_sets(comp: &[usize], t: &[usize], tp: &[usize], tpc: &[usize], b: &[GaussQ], tv: &[GaussQ], pairs: PairReading) -> Result<GaussQ> {
    let i = GaussQ::i();
    let (mut s0, mut s1, mut s2, mut sq) = (GaussQ::zero(), GaussQ::zero(), GaussQ::zero(), GaussQ::zero());
    for &k in comp {
        let bk = &b[k];
        let mut num = GaussQ::one();
        for &j in t {
            num *= &(bk + &b[j]);
        }
        for &j in tp {
            num *= &(bk + &(&i * &tv[j]));
        }
        let mut den = GaussQ::one();
        for &j in comp {
            if j != k {
                den *= &(bk - &b[j]);
            }
        }
        for &j in tpc {
            den *= &(bk - &(&i * &tv[j]));
        }
        let g = num.checked_div(&den)?;
        let gb = &g * bk;
        s0 += &g;
        s2 += &(&gb * bk);
        s1 += &gb;
        sq += &(&g * &g);
    }
    let two = GaussQ::int(2, 0);
    let cross = &(&two * &(&s1 * &s1)) - &(&two * &(&s0 * &s2));
    Ok(match pairs {
        PairReading::Ordered => &sq + &cross,
        PairReading::Distinct => cross,
    })
}

/// X_{T,T′}(B|T) at exact values.
pub fn x_kernel(pair: &SubsetPair, b: &[GaussQ], tv: &[GaussQ], reading: KernelReading) -> Result<GaussQ> {
    check_lengths(pair.n, pair.m, b, tv)?;
    match reading.denominators {
        DenominatorReading::SComplement => {
            x_kernel_sets(&pair.complement(), &pair.t, &pair.tp, &pair.complement_prime(), b, tv, reading.pairs)
        }
        DenominatorReading::SPrimeComplement => x_kernel_brute(pair, b, tv, reading),
    }
}

/// Which part of the subset sum to assemble.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MSpec {
    pub n: usize,
    pub m: usize,
    pub reading: KernelReading,
    /// keep only this T (breaks the cancellation; negative control)
    pub restrict_t: Option<Vec<usize>>,
    pub cap: usize,
}

impl MSpec {
    pub fn new(n: usize, m: usize) -> Self {
        Self { n, m, reading: KernelReading::default(), restrict_t: None, cap: DEFAULT_CAP }
    }

    pub fn with_pairs(mut self, p: PairReading) -> Self {
        self.reading.pairs = p;
        self
    }

    fn pairs(&self) -> Result<Vec<SubsetPair>> {
        if self.n < 1 || self.m < 1 || self.n + self.m > self.cap {
            return Err(Error::OutOfRange(format!("(n, m) = ({}, {}) outside cap n + m ≤ {}", self.n, self.m, self.cap)));
        }
        let all = SubsetPair::all(self.n, self.m)?;
        Ok(match &self.restrict_t {
            None => all,
            Some(t) => {
                let mut t = t.clone();
                t.sort_unstable();
                all.into_iter().filter(|p| p.t == t).collect()
            }
        })
    }

    pub fn variables(&self) -> Vec<String> {
        (1..self.n).map(|k| format!("A{k}")).chain((1..self.m).map(|k| format!("S{k}"))).collect()
    }
}

/// Everything in a summand except the A- and S-dependent factors.
fn pair_coefficient<F: Scalar>(p: &SubsetPair, b: &[F], tv: &[F], reading: KernelReading) -> Result<F> {
    let comp = p.complement();
    let tpc = p.complement_prime();
    let mut c = F::konst(GaussQ::one());
    for &j in &p.t {
        c = c.mul(&b[j]);
    }
    for (k, &i) in comp.iter().enumerate() {
        for &j in &comp[k + 1..] {
            c = c.mul(&b[i].add(&b[j]));
        }
    }
    for (k, &i) in tpc.iter().enumerate() {
        for &j in &tpc[k + 1..] {
            c = c.mul(&tv[i].add(&tv[j]));
        }
    }
    for &i in &p.t {
        for &j in &comp {
            c = c.div(&b[i].sub(&b[j]))?;
        }
    }
    for &i in &p.tp {
        for &j in &tpc {
            c = c.div(&tv[i].sub(&tv[j]))?;
        }
    }
    for &i in &p.t {
        for &j in &tpc {
            c = c.mul(&b[i].add(&i_times(&tv[j])));
        }
    }
    for &i in &p.tp {
        for &j in &comp {
            c = c.mul(&tv[i].add(&i_times(&b[j])));
        }
    }
    Ok(c.mul(&x_kernel_generic(&comp, &p.t, &p.tp, &tpc, b, tv, reading)?))
}

fn pair_coefficient_exact(p: &SubsetPair, b: &[GaussQ], tv: &[GaussQ], reading: KernelReading) -> Result<GaussQ> {
    // same as the generic path, with the fast kernel
    Ok(&pair_coefficient_without_kernel(p, b, tv)? * &x_kernel(p, b, tv, reading)?)
}

fn pair_coefficient_without_kernel(p: &SubsetPair, b: &[GaussQ], tv: &[GaussQ]) -> Result<GaussQ> {
    let comp = p.complement();
    let tpc = p.complement_prime();
    let i = GaussQ::i();
    let mut c = GaussQ::one();
    for &j in &p.t {
        c *= &b[j];
    }
    for (k, &x) in comp.iter().enumerate() {
        for &y in &comp[k + 1..] {
            c *= &(&b[x] + &b[y]);
        }
    }
    for (k, &x) in tpc.iter().enumerate() {
        for &y in &tpc[k + 1..] {
            c *= &(&tv[x] + &tv[y]);
        }
    }
    let mut den = GaussQ::one();
    for &x in &p.t {
        for &y in &comp {
            den *= &(&b[x] - &b[y]);
        }
    }
    for &x in &p.tp {
        for &y in &tpc {
            den *= &(&tv[x] - &tv[y]);
        }
    }
    for &x in &p.t {
        for &y in &tpc {
            c *= &(&b[x] + &(&i * &tv[y]));
        }
    }
    for &x in &p.tp {
        for &y in &comp {
            c *= &(&tv[x] + &(&i * &b[y]));
        }
    }
    c.checked_div(&den)
}

/// A- and S-dependent factors of a summand, and the global prefactor.
fn variable_part<F: Scalar>(p: &SubsetPair, a: &[F], s: &[F], b: &[F], tv: &[F]) -> F {
    let mut c = F::konst(GaussQ::one());
    for ai in a {
        for &j in &p.t {
            c = c.mul(&ai.add(&i_times(&b[j])));
        }
    }
    for si in s {
        for &j in &p.tp {
            c = c.mul(&si.add(&i_times(&tv[j])));
        }
    }
    c
}

fn prefactor<F: Scalar>(a: &[F], s: &[F], b: &[F]) -> F {
    let mut c = F::konst(GaussQ::one());
    for (k, x) in a.iter().enumerate() {
        for y in &a[k + 1..] {
            c = c.mul(&x.sub(y));
        }
    }
    for (k, x) in s.iter().enumerate() {
        for y in &s[k + 1..] {
            c = c.mul(&x.sub(y));
        }
    }
    for x in b.iter().chain(a) {
        c = c.mul(x);
    }
    c
}

fn check_point(spec: &MSpec, a: &[GaussQ], s: &[GaussQ], b: &[GaussQ], tv: &[GaussQ]) -> Result<()> {
    check_lengths(spec.n, spec.m, b, tv)?;
    if a.len() + 1 != spec.n || s.len() + 1 != spec.m {
        return Err(Error::Dimension(format!("need {} A and {} S values", spec.n - 1, spec.m - 1)));
    }
    Ok(())
}

/// M(A|S) at an exact point, summed term by term.
pub fn m_value(spec: &MSpec, a: &[GaussQ], s: &[GaussQ], b: &[GaussQ], tv: &[GaussQ]) -> Result<GaussQ> {
    check_point(spec, a, s, b, tv)?;
    let mut acc = GaussQ::zero();
    for p in spec.pairs()? {
        acc += &(&pair_coefficient_exact(&p, b, tv, spec.reading)? * &variable_part(&p, a, s, b, tv));
    }
    Ok(&prefactor(a, s, b) * &acc)
}

/// Same value through the generic term-by-term kernel (independent of the moment form).
pub fn m_value_brute(spec: &MSpec, a: &[GaussQ], s: &[GaussQ], b: &[GaussQ], tv: &[GaussQ]) -> Result<GaussQ> {
    check_point(spec, a, s, b, tv)?;
    let mut acc = GaussQ::zero();
    for p in spec.pairs()? {
        acc += &(&pair_coefficient(&p, b, tv, spec.reading)? * &variable_part(&p, a, s, b, tv));
    }
    Ok(&prefactor(a, s, b) * &acc)
}

/// M as a Laurent polynomial in A1…A_{n−1}, S1…S_{m−1} at fixed exact B, T.
pub fn m_polynomial(spec: &MSpec, b: &[GaussQ], tv: &[GaussQ]) -> Result<LaurentPoly> {
    check_lengths(spec.n, spec.m, b, tv)?;
    let names = spec.variables();
    let vars: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let a: Vec<LaurentPoly> = (1..spec.n).map(|k| LaurentPoly::var(&vars, &format!("A{k}"))).collect::<Result<_>>()?;
    let s: Vec<LaurentPoly> = (1..spec.m).map(|k| LaurentPoly::var(&vars, &format!("S{k}"))).collect::<Result<_>>()?;
    let i = GaussQ::i();
    let mut sum = LaurentPoly::zero(&vars);
    for p in spec.pairs()? {
        let c = pair_coefficient_exact(&p, b, tv, spec.reading)?;
        if c.is_zero() {
            continue;
        }
        let mut term = LaurentPoly::constant(&vars, c);
        for ai in &a {
            for &j in &p.t {
                term = term.mul(&ai.add(&LaurentPoly::constant(&vars, &i * &b[j]))?)?;
            }
        }
        for si in &s {
            for &j in &p.tp {
                term = term.mul(&si.add(&LaurentPoly::constant(&vars, &i * &tv[j]))?)?;
            }
        }
        sum = sum.add(&term)?;
    }
    let mut pre = LaurentPoly::constant(&vars, b.iter().fold(GaussQ::one(), |acc, x| &acc * x));
    for (k, x) in a.iter().enumerate() {
        for y in &a[k + 1..] {
            pre = pre.mul(&x.sub(y)?)?;
        }
        pre = pre.mul(x)?;
    }
    for (k, x) in s.iter().enumerate() {
        for y in &s[k + 1..] {
            pre = pre.mul(&x.sub(y)?)?;
        }
    }
    pre.mul(&sum)
}

/// A small random rational p/q, |p| ≤ 24, q ∈ {1, 2}.
pub fn random_rational<R: Rng>(r: &mut R) -> GaussQ {
    GaussQ::ratio(r.gen_range(-24..=24), r.gen_range(1..=2))
}

/// Random exact point with pairwise distinct B's and T's, B_i ≠ ±iT_j and nonzero B's.
pub fn random_point<R: Rng>(r: &mut R, n: usize, m: usize) -> (Vec<GaussQ>, Vec<GaussQ>, Vec<GaussQ>, Vec<GaussQ>) {
    loop {
        let b: Vec<GaussQ> = (0..2 * n).map(|_| random_rational(r)).collect();
        let tv: Vec<GaussQ> = (0..2 * m).map(|_| random_rational(r)).collect();
        let distinct = |v: &[GaussQ]| v.iter().enumerate().all(|(k, x)| !x.is_zero() && v[k + 1..].iter().all(|y| x != y && !(x + y).is_zero()));
        if distinct(&b) && distinct(&tv) {
            let a = (1..n).map(|_| random_rational(r)).collect();
            let s = (1..m).map(|_| random_rational(r)).collect();
            return (a, s, b, tv);
        }
    }
}

/// Certification strategies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    SymbolicCancellation,
    Interpolation,
}

/// A parameter treated as the free variable of a slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SliceVar {
    B(usize),
    T(usize),
}

impl SliceVar {
    fn label(&self) -> String {
        match self {
            SliceVar::B(k) => format!("B{}", k + 1),
            SliceVar::T(k) => format!("T{}", k + 1),
        }
    }
}

/// M as a rational function of one parameter, everything else at exact values.
pub fn m_slice(spec: &MSpec, var: SliceVar, a: &[GaussQ], s: &[GaussQ], b: &[GaussQ], tv: &[GaussQ]) -> Result<(Frac, Vec<Frac>)> {
    check_point(spec, a, s, b, tv)?;
    let lift = |v: &[GaussQ]| -> Vec<Frac> { v.iter().map(|x| Frac::konst(x.clone())).collect() };
    let free = Frac::poly(UPoly::linear(GaussQ::one(), GaussQ::zero()));
    let (mut bf, mut tf) = (lift(b), lift(tv));
    match var {
        SliceVar::B(k) if k < b.len() => bf[k] = free,
        SliceVar::T(k) if k < tv.len() => tf[k] = free,
        _ => return Err(Error::OutOfRange(format!("slice variable {var:?}"))),
    }
    let (af, sf) = (lift(a), lift(s));
    let mut terms = Vec::new();
    for p in spec.pairs()? {
        terms.push(pair_coefficient(&p, &bf, &tf, spec.reading)?.mul(&variable_part(&p, &af, &sf, &bf, &tf)));
    }
    let pre = prefactor(&af, &sf, &bf);
    let total = Frac::sum(&terms).mul(&pre);
    let terms = terms.into_iter().map(|t| t.mul(&pre)).collect();
    Ok((total, terms))
}

/// Largest degree in the slice variable over the summands (numerator minus denominator).
pub fn structural_degree(spec: &MSpec, var: SliceVar) -> Result<i64> {
    let (mut b, mut tv) = (vec![Deg(0); 2 * spec.n], vec![Deg(0); 2 * spec.m]);
    match var {
        SliceVar::B(k) if k < b.len() => b[k] = Deg(1),
        SliceVar::T(k) if k < tv.len() => tv[k] = Deg(1),
        _ => return Err(Error::OutOfRange(format!("slice variable {var:?}"))),
    }
    let (a, s) = (vec![Deg(0); spec.n - 1], vec![Deg(0); spec.m - 1]);
    let pre = prefactor(&a, &s, &b);
    let mut best = i64::MIN;
    for p in spec.pairs()? {
        let d = pair_coefficient(&p, &b, &tv, spec.reading)?.mul(&variable_part(&p, &a, &s, &b, &tv)).mul(&pre);
        best = best.max(d.0);
    }
    Ok(best)
}

/// Outcome for one slice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceOutcome {
    pub variable: String,
    pub pass: bool,
    /// surviving pole orders at the coincidences B_i = B_j (or T_i = T_j)
    pub claimed_poles: u32,
    /// surviving poles elsewhere (B_i = ±iT_j), not covered by the claim
    pub other_poles: u32,
    pub degree: i64,
    /// |remainder| of the first failed division, 0 when divisible
    pub residual: f64,
}

/// Symbolic strategy on one slice: common denominator over the subset sum, then exact
/// division of the numerator by every coincidence factor.
fn certify_symbolic(spec: &MSpec, var: SliceVar, a: &[GaussQ], s: &[GaussQ], b: &[GaussQ], tv: &[GaussQ]) -> Result<SliceOutcome> {
    let (total, _) = m_slice(spec, var, a, s, b, tv)?;
    let claimed: Vec<GaussQ> = match var {
        SliceVar::B(k) => b.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, x)| x.clone()).collect(),
        SliceVar::T(k) => tv.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, x)| x.clone()).collect(),
    };
    let mut num = total.num.clone();
    let mut residual = 0.0f64;
    let mut claimed_poles = 0;
    let mut other_poles = 0;
    let mut denominator_degree = 0i64;
    for (r, &k) in &total.poles {
        let mut left = k;
        while left > 0 && !num.is_zero() {
            let (q, rem) = num.div_root(r);
            if !rem.is_zero() {
                if claimed.contains(r) && residual == 0.0 {
                    residual = rem.magnitude();
                }
                break;
            }
            num = q;
            left -= 1;
        }
        if num.is_zero() {
            left = 0;
        }
        denominator_degree += left as i64;
        if claimed.contains(r) {
            claimed_poles += left;
        } else {
            other_poles += left;
        }
    }
    Ok(SliceOutcome {
        variable: var.label(),
        pass: claimed_poles == 0,
        claimed_poles,
        other_poles,
        degree: if num.is_zero() { -1 } else { num.degree() - denominator_degree },
        residual,
    })
}

/// Interpolation strategy on one slice: clear the uncovered denominators ∏(B_i − iT_j),
/// fit a polynomial of the structural degree bound through exact samples, and demand
/// exact agreement at fresh samples.
fn certify_interpolation<R: Rng>(
    spec: &MSpec,
    var: SliceVar,
    a: &[GaussQ],
    s: &[GaussQ],
    b: &[GaussQ],
    tv: &[GaussQ],
    r: &mut R,
) -> Result<SliceOutcome> {
    let i = GaussQ::i();
    // cleared function: M · ∏_{i,j}(B_i − iT_j)
    let clear_degree = match var {
        SliceVar::B(_) => 2 * spec.m as i64,
        SliceVar::T(_) => 2 * spec.n as i64,
    };
    let bound = structural_degree(spec, var)?.max(0) + clear_degree;
    let value = |x: &GaussQ| -> Result<GaussQ> {
        let (mut bb, mut tt) = (b.to_vec(), tv.to_vec());
        match var {
            SliceVar::B(k) => bb[k] = x.clone(),
            SliceVar::T(k) => tt[k] = x.clone(),
        }
        let mut clear = GaussQ::one();
        for bi in &bb {
            for tj in &tt {
                clear *= &(bi - &(&i * tj));
            }
        }
        Ok(&m_value(spec, a, s, &bb, &tt)? * &clear)
    };
    let mut xs: Vec<GaussQ> = Vec::new();
    let mut ys: Vec<GaussQ> = Vec::new();
    let needed = bound as usize + 1 + 3;
    let mut attempts = 0;
    while xs.len() < needed {
        attempts += 1;
        if attempts > 50 * needed {
            return Err(Error::Parameter("could not find enough regular sample points".into()));
        }
        let x = GaussQ::ratio(r.gen_range(-400..=400), r.gen_range(1..=2));
        if xs.contains(&x) {
            continue;
        }
        if let Ok(y) = value(&x) {
            xs.push(x);
            ys.push(y);
        }
    }
    let fit = bound as usize + 1;
    let newton = newton_coefficients(&xs[..fit], &ys[..fit])?;
    let mut residual = 0.0f64;
    for (x, y) in xs[fit..].iter().zip(&ys[fit..]) {
        let d = &newton_eval(&newton, &xs[..fit], x) - y;
        residual = residual.max(d.magnitude());
    }
    let pass = residual == 0.0;
    Ok(SliceOutcome {
        variable: var.label(),
        pass,
        claimed_poles: if pass { 0 } else { 1 },
        other_poles: 0,
        degree: bound - clear_degree,
        residual,
    })
}

fn newton_coefficients(xs: &[GaussQ], ys: &[GaussQ]) -> Result<Vec<GaussQ>> {
    let mut c = ys.to_vec();
    for k in 1..xs.len() {
        for j in (k..xs.len()).rev() {
            c[j] = (&c[j] - &c[j - 1]).checked_div(&(&xs[j] - &xs[j - k]))?;
        }
    }
    Ok(c)
}

fn newton_eval(c: &[GaussQ], xs: &[GaussQ], x: &GaussQ) -> GaussQ {
    let mut acc = c[c.len() - 1].clone();
    for k in (0..c.len() - 1).rev() {
        acc = &(&acc * &(x - &xs[k])) + &c[k];
    }
    acc
}

/// Polynomiality certification verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    pub n: usize,
    pub m: usize,
    pub strategy: Strategy,
    pub reading: KernelReading,
    pub pass: bool,
    /// pair reading switched from ordered to distinct because ordered failed
    pub switched: bool,
    /// the failing slice of the ordered reading, when it was rejected
    pub rejected: Option<SliceOutcome>,
    pub slices: Vec<SliceOutcome>,
    pub terms: usize,
}

impl Certification {
    pub fn report(&self) -> CheckReport {
        let worst = self.slices.iter().map(|s| s.claimed_poles as f64).fold(0.0, f64::max);
        let mut r = CheckReport::new(format!("m-polynomiality-{}-{}-{:?}", self.n, self.m, self.strategy).to_lowercase(), worst, 0.0, self.slices.len());
        r.pass = self.pass;
        r.with_details(json!({
            "reading": self.reading,
            "switched_to_distinct": self.switched,
            "rejected_ordered_slice": self.rejected,
            "terms": self.terms,
            "slices": self.slices,
        }))
    }
}

fn certify_once(spec: &MSpec, strategy: Strategy, seed: u64, stop_on_failure: bool) -> Result<Certification> {
    let mut r = rng(seed);
    let (a, s, b, tv) = random_point(&mut r, spec.n, spec.m);
    let vars: Vec<SliceVar> = (0..2 * spec.n).map(SliceVar::B).chain((0..2 * spec.m).map(SliceVar::T)).collect();
    let mut slices = Vec::new();
    for v in vars {
        slices.push(match strategy {
            Strategy::SymbolicCancellation => certify_symbolic(spec, v, &a, &s, &b, &tv)?,
            Strategy::Interpolation => certify_interpolation(spec, v, &a, &s, &b, &tv, &mut r)?,
        });
        if stop_on_failure && !slices.last().unwrap().pass {
            break;
        }
    }
    Ok(Certification {
        n: spec.n,
        m: spec.m,
        strategy,
        reading: spec.reading,
        pass: slices.iter().all(|s| s.pass),
        switched: false,
        rejected: None,
        terms: spec.pairs()?.len(),
        slices,
    })
}

/// Certify that M has no B_i − B_j or T_i − T_j denominators. With the ordered pair
/// reading, a failure triggers a retry with distinct pairs, recorded as `switched`.
pub fn check_polynomiality(spec: &MSpec, strategy: Strategy, seed: u64) -> Result<Certification> {
    let exploratory = spec.reading.pairs == PairReading::Ordered && spec.restrict_t.is_none();
    let first = certify_once(spec, strategy, seed, exploratory)?;
    if first.pass || spec.reading.pairs == PairReading::Distinct || spec.restrict_t.is_some() {
        return Ok(first);
    }
    let mut retry = certify_once(&spec.clone().with_pairs(PairReading::Distinct), strategy, seed, false)?;
    retry.switched = true;
    retry.rejected = first.slices.last().cloned();
    Ok(retry)
}

/// Max over `points` random points of |M(swapped) + M| for a swap of two A's
/// (or two S's); exact zero means skew-symmetry.
pub fn skew_symmetry_defect(spec: &MSpec, swap_s: bool, points: usize, seed: u64) -> Result<f64> {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..points {
        let (a, s, b, tv) = random_point(&mut r, spec.n, spec.m);
        let (mut a2, mut s2) = (a.clone(), s.clone());
        if swap_s {
            if s.len() < 2 {
                return Err(Error::Parameter("need m ≥ 3 to swap S's".into()));
            }
            s2.swap(0, 1);
        } else {
            if a.len() < 2 {
                return Err(Error::Parameter("need n ≥ 3 to swap A's".into()));
            }
            a2.swap(0, 1);
        }
        let d = &m_value(spec, &a, &s, &b, &tv)? + &m_value(spec, &a2, &s2, &b, &tv)?;
        worst = worst.max(d.magnitude());
    }
    Ok(worst)
}

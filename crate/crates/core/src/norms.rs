//! The weighted norms `Λ_{d,p}(k)`, their closed forms and bounds, and the
//! search for the degree `k` maximising them.

use std::collections::HashMap;
use std::f64::consts::{E, LN_2, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{
    critical_exponent, integrate_weighted_power, tail_bound, Enclosure, QuadConfig,
};
use crate::record::Status;
use crate::specfun::{
    default_search_cap, gamma_half_integer, gamma_ratio_ln, jv_scaled, log_gamma_unchecked,
    sup_critical_point, BesselOrder, EvalAccuracy, LANDAU,
};

/// Grid spacing of the sup-norm guard scan.
pub const GUARD_STEP: f64 = 0.01;
/// Largest excess over the critical-point value tolerated by the guard scan.
pub const GUARD_SLACK: f64 = 1e-9;

/// Exponent `p`, finite or `∞`. Serialised as its decimal string or `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(self) -> Option<f64> {
        match self {
            Exponent::Finite(p) => Some(p),
            Exponent::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    fn bits(self) -> u64 {
        match self {
            Exponent::Finite(p) => p.to_bits(),
            Exponent::Infinity => f64::INFINITY.to_bits(),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            other => match other.parse::<f64>() {
                Ok(p) if p.is_infinite() && p > 0.0 => Ok(Exponent::Infinity),
                Ok(p) if p.is_finite() => Ok(Exponent::Finite(p)),
                _ => Err(Error::domain(format!("cannot parse exponent {s:?}"))),
            },
        }
    }
}

impl From<Exponent> for String {
    fn from(p: Exponent) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for Exponent {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// `(d, p, k)` with `d ≥ 2` and `p > 2d/(d-1)` or `p = ∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawKey")]
pub struct NormKey {
    d: u32,
    p: Exponent,
    k: u32,
}

#[derive(Deserialize)]
struct RawKey {
    d: u32,
    p: Exponent,
    k: u32,
}

impl TryFrom<RawKey> for NormKey {
    type Error = Error;

    fn try_from(raw: RawKey) -> Result<Self> {
        NormKey::new(raw.d, raw.p, raw.k)
    }
}

impl NormKey {
    pub fn new(d: u32, p: Exponent, k: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::domain(format!(
                "dimension d = {d} must be at least 2"
            )));
        }
        if let Exponent::Finite(pf) = p {
            if !(pf > critical_exponent(d)) {
                return Err(Error::domain(format!(
                    "exponent p = {pf} is not admissible for d = {d}: need p > 2d/(d-1) = {}",
                    critical_exponent(d)
                )));
            }
        }
        let nu = BesselOrder::for_degree(d, k)?;
        let limit = EvalAccuracy::default().max_twice_nu;
        if nu.twice_nu() > limit {
            return Err(Error::domain(format!(
                "order ν = {} exceeds the supported limit {} (d = {d}, k = {k})",
                nu.value(),
                f64::from(limit) / 2.0
            )));
        }
        Ok(Self { d, p, k })
    }

    pub fn finite(d: u32, p: f64, k: u32) -> Result<Self> {
        Self::new(d, Exponent::Finite(p), k)
    }

    pub fn sup(d: u32, k: u32) -> Result<Self> {
        Self::new(d, Exponent::Infinity, k)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> BesselOrder {
        BesselOrder::from_twice(self.d - 2 + 2 * self.k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    QuadratureTail,
    ClosedForm,
    SupScan,
}

/// An enclosure of `Λ_{d,p}(k)`. For finite `p`, `power` encloses `Λ^p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub key: NormKey,
    pub enclosure: Enclosure,
    pub power: Option<Enclosure>,
    /// Truncation radius for quadrature values; end of the guard scan for
    /// sup values; zero for closed forms.
    pub r_used: f64,
    /// Location of the maximum for sup values.
    pub location: Option<f64>,
    pub method: Method,
}

/// `Λ_{d,∞}(0) = 1/(2^{d/2-1} Γ(d/2))`.
pub fn lambda_sup_zero_closed(d: u32) -> f64 {
    let h = f64::from(d) / 2.0;
    (-(h - 1.0) * LN_2).exp() / gamma_half_integer(d)
}

/// `Λ_{d,4}(0)` from `Λ⁴ = Γ(ν)Γ(2ν) / (2π Γ(ν+1/2)² Γ(3ν))`, `ν = d/2 - 1`.
pub fn lambda4_zero(d: u32) -> Result<f64> {
    if d < 3 {
        return Err(Error::domain(format!(
            "lambda4_zero needs d >= 3, got d = {d}"
        )));
    }
    let nu = f64::from(d) / 2.0 - 1.0;
    let ln4 = gamma_ratio_ln(&[nu, 2.0 * nu], &[nu + 0.5, nu + 0.5, 3.0 * nu]) - (2.0 * PI).ln();
    Ok((ln4 / 4.0).exp())
}

/// `∫_0^∞ J_ν(r)² r^{-λ} dr` for `0 < λ < 2ν + 1`.
pub fn weighted_l2_identity(nu: BesselOrder, lambda: f64) -> Result<f64> {
    let v = nu.value();
    if !(lambda > 0.0 && lambda < 2.0 * v + 1.0) {
        return Err(Error::domain(format!(
            "weighted L2 identity needs 0 < λ < 2ν+1 = {}, got λ = {lambda}",
            2.0 * v + 1.0
        )));
    }
    let ln = gamma_ratio_ln(
        &[lambda, v + (1.0 - lambda) / 2.0],
        &[
            (1.0 + lambda) / 2.0,
            (1.0 + lambda) / 2.0,
            v + (1.0 + lambda) / 2.0,
        ],
    ) - lambda * LN_2;
    Ok(ln.exp())
}

/// Open interval of `p` on which [`upper_bound_u`] is defined for every `k ≥ 1`.
pub fn u_strip(d: u32) -> (f64, f64) {
    let df = f64::from(d);
    (
        (6.0 * df - 2.0) / (3.0 * df - 4.0),
        (12.0 * df + 4.0) / (3.0 * df - 4.0),
    )
}

fn u_lambda(d: u32, p: f64) -> f64 {
    let df = f64::from(d);
    p * (df / 2.0 - 2.0 / 3.0) - df + 1.0 / 3.0
}

/// `U_{d,p}(k) = L^{p-2} ∫ J_ν² r^{-λ} dr`, `λ = p(d/2 - 2/3) - d + 1/3`:
/// an upper bound on `Λ_{d,p}(k)^p`, decreasing in `k`.
pub fn upper_bound_u(d: u32, p: f64, k: u32) -> Result<f64> {
    if d < 2 {
        return Err(Error::domain(format!(
            "dimension d = {d} must be at least 2"
        )));
    }
    if k == 0 {
        return Err(Error::domain("upper bound U needs k >= 1"));
    }
    let (lo, hi) = u_strip(d);
    if !(p > lo && p < hi) {
        return Err(Error::domain(format!(
            "U bound needs {lo} < p < {hi} for d = {d}, got p = {p}"
        )));
    }
    let l2 = weighted_l2_identity(BesselOrder::for_degree(d, k)?, u_lambda(d, p))?;
    Ok(LANDAU.powf(p - 2.0) * l2)
}

/// Lower bound on `Λ_{d,p}(0)`:
/// `(2^{d-1}(d/2)^{d/2})^{1/p} / (2^{d/2-1}Γ(d/2)) · (Γ(p+1)Γ(d/2)/Γ(p+d/2+1))^{1/p}`.
pub fn lower_bound_l0(d: u32, p: f64) -> Result<f64> {
    NormKey::finite(d, p, 0)?;
    Ok(l0_ln(d, p).exp())
}

pub(crate) fn l0_ln(d: u32, p: f64) -> f64 {
    let (c0, c1) = l0_constants(d);
    let h = f64::from(d) / 2.0;
    c0 + (c1 + log_gamma_unchecked(p + 1.0) - log_gamma_unchecked(p + h + 1.0)) / p
}

/// `ln L0(d,p) = c0 + (c1 + lnΓ(p+1) - lnΓ(p+d/2+1))/p`; `c0 = ln Λ_{d,∞}(0)`.
pub(crate) fn l0_constants(d: u32) -> (f64, f64) {
    let df = f64::from(d);
    let h = df / 2.0;
    let c0 = -(h - 1.0) * LN_2 - log_gamma_unchecked(h);
    let c1 = (df - 1.0) * LN_2 + h * h.ln() + log_gamma_unchecked(h);
    (c0, c1)
}

/// Bound on `Λ_{d,∞}(k)` that is decreasing in `k ≥ 1`:
/// `max(r_c^{1-d/2}/√(2πν), L·r_c^{2/3-d/2})` with `r_c = 2ν/e`.
pub fn sup_decay_bound(d: u32, k: u32) -> Result<f64> {
    let nu = BesselOrder::for_degree(d, k)?.value();
    if nu <= 0.0 {
        return Err(Error::domain("sup decay bound needs ν > 0"));
    }
    let h = f64::from(d) / 2.0;
    let rc = 2.0 * nu / E;
    let near = rc.powf(1.0 - h) / (2.0 * PI * nu).sqrt();
    let far = LANDAU * rc.powf(2.0 / 3.0 - h);
    Ok(near.max(far))
}

/// Default truncation radius `max(200, 3ν)`.
pub fn default_radius(d: u32, k: u32) -> f64 {
    let nu = f64::from(d) / 2.0 - 1.0 + f64::from(k);
    200f64.max(3.0 * nu)
}

/// Which cached quantity a memo entry holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueKind {
    /// `∫_0^R` only, no tail.
    Truncated,
    Finite,
    Sup,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct MemoKey {
    kind: ValueKind,
    d: u32,
    p_bits: u64,
    k: u32,
    r_bits: u64,
}

/// A memoised result, in the form exported to and imported from the
/// on-disk cache.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub kind: ValueKind,
    pub key: NormKey,
    pub radius: f64,
    pub value: CachedValue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CachedValue {
    Norm(NormValue),
    Truncated(Enclosure),
}

impl CacheEntry {
    fn memo_key(&self) -> MemoKey {
        MemoKey {
            kind: self.kind,
            d: self.key.d,
            p_bits: self.key.p.bits(),
            k: self.key.k,
            r_bits: self.radius.to_bits(),
        }
    }

    /// Canonical text identifying the entry (independent of the value).
    pub fn identity(&self) -> String {
        format!(
            "{:?}|d={}|p={}|k={}|R={:016x}",
            self.kind,
            self.key.d,
            self.key.p,
            self.key.k,
            self.radius.to_bits()
        )
    }
}

/// Computes norms for one quadrature configuration, memoising results.
/// Concurrent duplicate computation is harmless: values are deterministic.
#[derive(Debug, Default)]
pub struct NormEngine {
    quad: QuadConfig,
    memo: RwLock<HashMap<MemoKey, CachedValue>>,
}

impl NormEngine {
    pub fn new(quad: QuadConfig) -> Result<Self> {
        quad.validate()?;
        Ok(Self {
            quad,
            memo: RwLock::new(HashMap::new()),
        })
    }

    pub fn quad_config(&self) -> &QuadConfig {
        &self.quad
    }

    fn lookup(&self, key: &MemoKey) -> Option<CachedValue> {
        self.memo.read().ok().and_then(|m| m.get(key).cloned())
    }

    fn store(&self, key: MemoKey, value: CachedValue) {
        if let Ok(mut m) = self.memo.write() {
            m.entry(key).or_insert(value);
        }
    }

    fn memo_key(kind: ValueKind, key: &NormKey, radius: f64) -> MemoKey {
        MemoKey {
            kind,
            d: key.d,
            p_bits: key.p.bits(),
            k: key.k,
            r_bits: radius.to_bits(),
        }
    }

    /// All memoised values, sorted by identity for reproducible output.
    pub fn export(&self) -> Vec<CacheEntry> {
        let mut out: Vec<CacheEntry> = match self.memo.read() {
            Ok(m) => m
                .iter()
                .filter_map(|(mk, v)| {
                    let p = if mk.p_bits == f64::INFINITY.to_bits() {
                        Exponent::Infinity
                    } else {
                        Exponent::Finite(f64::from_bits(mk.p_bits))
                    };
                    let key = NormKey::new(mk.d, p, mk.k).ok()?;
                    Some(CacheEntry {
                        kind: mk.kind,
                        key,
                        radius: f64::from_bits(mk.r_bits),
                        value: v.clone(),
                    })
                })
                .collect(),
            Err(_) => Vec::new(),
        };
        out.sort_by_key(CacheEntry::identity);
        out
    }

    /// Seeds the memo. Entries whose value does not match their kind, or
    /// whose enclosure is malformed, are dropped.
    pub fn import(&self, entries: impl IntoIterator<Item = CacheEntry>) -> usize {
        let mut n = 0;
        for e in entries {
            let ok = match (&e.kind, &e.value) {
                (ValueKind::Truncated, CachedValue::Truncated(enc)) => enc.check().is_ok(),
                (ValueKind::Finite | ValueKind::Sup, CachedValue::Norm(v)) => {
                    v.key == e.key && v.enclosure.check().is_ok() && v.enclosure.lower > 0.0
                }
                _ => false,
            };
            if ok {
                self.store(e.memo_key(), e.value);
                n += 1;
            }
        }
        n
    }

    pub fn clear(&self) {
        if let Ok(mut m) = self.memo.write() {
            m.clear();
        }
    }

    /// Enclosure of `∫_0^R |J_ν r^{1-d/2}|^p r^{d-1} dr` without tail.
    pub fn truncated_power(&self, d: u32, p: f64, k: u32, radius: f64) -> Result<Enclosure> {
        let key = NormKey::finite(d, p, k)?;
        let mk = Self::memo_key(ValueKind::Truncated, &key, radius);
        if let Some(CachedValue::Truncated(e)) = self.lookup(&mk) {
            return Ok(e);
        }
        let e = integrate_weighted_power(d, p, k, radius, &self.quad)?;
        self.store(mk, CachedValue::Truncated(e));
        Ok(e)
    }

    /// `Λ_{d,p}(k)` for finite `p`: truncated integral plus tail bound, then
    /// the `p`-th root of both ends.
    pub fn lambda_finite(&self, key: NormKey, radius: f64) -> Result<NormValue> {
        let p = key.p.finite().ok_or_else(|| {
            Error::domain("lambda_finite needs a finite exponent; use lambda_sup")
        })?;
        let mk = Self::memo_key(ValueKind::Finite, &key, radius);
        if let Some(CachedValue::Norm(v)) = self.lookup(&mk) {
            return Ok(v);
        }
        let tail = tail_bound(key.d, p, key.k, radius)?;
        let power = self
            .truncated_power(key.d, p, key.k, radius)?
            .with_tail(tail);
        if !(power.lower > 0.0) {
            return Err(Error::domain(format!(
                "enclosure of Λ^p for {key:?} is not positive: {power:?}; tighten the quadrature"
            )));
        }
        let value = NormValue {
            key,
            enclosure: power.powf(1.0 / p),
            power: Some(power),
            r_used: radius,
            location: None,
            method: Method::QuadratureTail,
        };
        self.store(mk, CachedValue::Norm(value.clone()));
        Ok(value)
    }

    /// `Λ_{d,p}(k)` at the default radius.
    pub fn lambda_default(&self, d: u32, p: f64, k: u32) -> Result<NormValue> {
        self.lambda_finite(NormKey::finite(d, p, k)?, default_radius(d, k))
    }

    /// `Λ_{d,∞}(k)`. Closed form for `k = 0`; otherwise the value at the
    /// first critical point, confirmed by a guard scan with step 0.01 over
    /// `(0, 3ν+20]` and the decay bound `r^{1-d/2} min(r^{-1/2}, L r^{-1/3})`
    /// beyond it.
    pub fn lambda_sup(&self, d: u32, k: u32) -> Result<NormValue> {
        let key = NormKey::sup(d, k)?;
        let mk = Self::memo_key(ValueKind::Sup, &key, 0.0);
        if let Some(CachedValue::Norm(v)) = self.lookup(&mk) {
            return Ok(v);
        }
        let value = if k == 0 {
            let v = lambda_sup_zero_closed(d);
            NormValue {
                key,
                enclosure: Enclosure::from_parts(v, 4.0 * f64::EPSILON * v, 0.0),
                power: None,
                r_used: 0.0,
                location: Some(0.0),
                method: Method::ClosedForm,
            }
        } else {
            sup_by_scan(key)?
        };
        self.store(mk, CachedValue::Norm(value.clone()));
        Ok(value)
    }

    /// Dispatches on the exponent; finite values use the default radius.
    pub fn lambda(&self, key: NormKey) -> Result<NormValue> {
        match key.p {
            Exponent::Finite(_) => self.lambda_finite(key, default_radius(key.d, key.k)),
            Exponent::Infinity => self.lambda_sup(key.d, key.k),
        }
    }

    /// Argmax of `Λ_{d,p}(k)` over `k ≥ 0`: explicit enclosures for
    /// `k ≤ k_explicit`, and a bound decreasing in `k` for the rest.
    pub fn best_k(&self, d: u32, p: Exponent, k_explicit: u32) -> Result<BestK> {
        if let Exponent::Finite(pf) = p {
            NormKey::finite(d, pf, 0)?;
            let (lo, hi) = u_strip(d);
            if !(pf > lo && pf < hi) {
                return Err(Error::domain(format!(
                    "best_k needs p = ∞ or {lo} < p < {hi} for d = {d}, got p = {pf}"
                )));
            }
        }
        let values: Vec<NormValue> = (0..=k_explicit)
            .map(|k| self.lambda(NormKey::new(d, p, k)?))
            .collect::<Result<_>>()?;
        let compared: Vec<Enclosure> = values
            .iter()
            .map(|v| v.power.unwrap_or(v.enclosure))
            .collect();

        let argmax = (0..compared.len())
            .max_by(|&a, &b| compared[a].lower.total_cmp(&compared[b].lower))
            .unwrap_or(0);
        let top = compared[argmax];
        let margins: Vec<f64> = compared
            .iter()
            .enumerate()
            .map(|(k, e)| {
                if k == argmax {
                    0.0
                } else {
                    top.lower - e.upper
                }
            })
            .collect();
        let separated = margins
            .iter()
            .enumerate()
            .all(|(k, &m)| k == argmax || m > 0.0);

        let dominated_from = k_explicit + 1;
        let domination_bound = match p {
            Exponent::Finite(pf) => upper_bound_u(d, pf, dominated_from)?,
            Exponent::Infinity => sup_decay_bound(d, dominated_from)?,
        };
        let domination_margin = top.lower - domination_bound;
        let status = if separated && domination_margin > 0.0 {
            Status::Pass
        } else {
            Status::Inconclusive
        };

        Ok(BestK {
            d,
            p,
            k_explicit,
            argmax: argmax as u32,
            status,
            values,
            compared,
            margins,
            dominated_from,
            domination_bound,
            domination_margin,
        })
    }
}

fn sup_by_scan(key: NormKey) -> Result<NormValue> {
    let (d, k) = (key.d, key.k);
    let nu = key.order();
    let shift = f64::from(d) / 2.0 - 1.0;
    let r_star = sup_critical_point(
        d,
        k,
        default_search_cap(d, k).min(EvalAccuracy::default().max_argument),
    )?;
    let v = jv_scaled(nu, shift, r_star).abs();

    let scan_end = 3.0 * nu.value() + 20.0;
    let n = (scan_end / GUARD_STEP).ceil() as usize;
    let (mut found, mut at) = (0.0f64, 0.0);
    for i in 1..=n {
        let r = (i as f64 * GUARD_STEP).min(scan_end);
        let g = jv_scaled(nu, shift, r).abs();
        if g > found {
            found = g;
            at = r;
        }
    }
    if found > v + GUARD_SLACK {
        return Err(Error::GuardScan {
            found,
            at,
            critical: v,
        });
    }
    // |J_ν(r)| ≤ min(r^{-1/2}, L r^{-1/3}) for r ≥ 3ν/2; the bound decreases in r.
    let decay = scan_end.powf(-shift) * scan_end.powf(-0.5).min(LANDAU * scan_end.powf(-1.0 / 3.0));
    if decay > v {
        return Err(Error::GuardScan {
            found: decay,
            at: scan_end,
            critical: v,
        });
    }
    let err = EvalAccuracy::default().target_rel_error * v;
    Ok(NormValue {
        key,
        enclosure: Enclosure::from_parts(v, err, 0.0),
        power: None,
        r_used: scan_end,
        location: Some(r_star),
        method: Method::SupScan,
    })
}

/// Result of the argmax search. `compared` holds the enclosures actually
/// compared: `Λ^p` for finite `p`, `Λ_{d,∞}` otherwise; `margins[k]` is
/// `compared[argmax].lower - compared[k].upper`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestK {
    pub d: u32,
    pub p: Exponent,
    pub k_explicit: u32,
    pub argmax: u32,
    pub status: Status,
    pub values: Vec<NormValue>,
    pub compared: Vec<Enclosure>,
    pub margins: Vec<f64>,
    pub dominated_from: u32,
    pub domination_bound: f64,
    pub domination_margin: f64,
}

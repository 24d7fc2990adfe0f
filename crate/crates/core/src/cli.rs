//! Commands behind the `isoclass` binary, returning structured reports.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::curve::{count_points, group_structure_over_extension, Curve, GroupStructure};
use crate::endoring::conductor;
use crate::error::{Error, Result};
use crate::field::{is_prime_u64, PrimeField};
use crate::isomorphy::{
    gcd_criterion, iso_pattern, pattern_eval, predicted_group_structure, ComparisonInput, IsoPattern, PrimeCase,
};
use crate::quadorder::{frobenius_from_trace, DeltaVariant, FrobeniusData};

/// `q:A,B`, the curve y² = x³ + Ax + B over the prime field F_q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveSpec {
    pub q: u64,
    pub a: u64,
    pub b: u64,
}

impl FromStr for CurveSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected q:A,B, got {s:?}"));
        let (q, rest) = s.split_once(':').ok_or_else(bad)?;
        let (a, b) = rest.split_once(',').ok_or_else(bad)?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if !is_prime_u64(q) {
            return Err(Error::NotPrime(q.to_string()));
        }
        let bq = BigInt::from(q);
        let reduce = |n: BigInt| n.mod_floor(&bq).to_u64().unwrap();
        Ok(Self { q, a: reduce(a), b: reduce(b) })
    }
}

impl std::fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{},{}", self.q, self.a, self.b)
    }
}

impl CurveSpec {
    pub fn curve(&self) -> Result<Curve<PrimeField>> {
        let field = PrimeField::new(self.q)?;
        Curve::new(field, self.a, self.b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputReport {
    pub command: String,
    pub curves: Vec<String>,
    pub kmax: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusReport {
    #[serde(with = "crate::decimal")]
    pub q: BigUint,
    #[serde(with = "crate::decimal")]
    pub t: BigInt,
    #[serde(with = "crate::decimal")]
    pub a: BigInt,
    #[serde(with = "crate::decimal")]
    pub b: BigInt,
    #[serde(with = "crate::decimal")]
    pub m: BigInt,
    pub delta: DeltaVariant,
}

impl From<&FrobeniusData> for FrobeniusReport {
    fn from(f: &FrobeniusData) -> Self {
        Self {
            q: f.q().clone(),
            t: f.t().clone(),
            a: f.a().clone(),
            b: f.b().clone(),
            m: f.m().clone(),
            delta: f.variant(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeReport {
    #[serde(with = "crate::decimal")]
    pub p: u64,
    #[serde(with = "crate::decimal")]
    pub s: u64,
    #[serde(with = "crate::decimal")]
    pub e: u64,
    pub strict: bool,
    pub case: PrimeCase,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternReport {
    #[serde(with = "crate::decimal")]
    pub modulus: u64,
    #[serde(with = "crate::decimal::vec")]
    pub allowed: Vec<u64>,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerK {
    pub k: u64,
    pub gcd: bool,
    pub pattern: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleRow {
    pub k: u64,
    pub first: GroupStructure,
    pub second: GroupStructure,
    pub isomorphic: bool,
    pub predicted: bool,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub curve: String,
    pub k: u64,
    #[serde(with = "crate::decimal")]
    pub points: BigUint,
    pub structure: GroupStructure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub input: InputReport,
    pub frobenius: FrobeniusReport,
    #[serde(with = "crate::decimal::vec")]
    pub conductors: Vec<BigUint>,
    pub primes: Vec<PrimeReport>,
    pub pattern: Option<PatternReport>,
    pub per_k: Option<Vec<PerK>>,
    pub oracle: Option<Vec<OracleRow>>,
    pub structures: Option<Vec<StructureReport>>,
}

/// Process exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Supersingular { .. } => 3,
        Error::CountMismatch(..) => 4,
        Error::Capacity { .. } => 5,
        _ => 2,
    }
}

struct Analyzed {
    spec: CurveSpec,
    curve: Curve<PrimeField>,
    count: u64,
    frob: FrobeniusData,
}

fn analyze_curve(spec: &CurveSpec) -> Result<Analyzed> {
    let curve = spec.curve()?;
    let count = count_points(&curve);
    let t = BigInt::from(spec.q) + 1 - BigInt::from(count);
    let frob = frobenius_from_trace(&BigUint::from(spec.q), &t)?;
    Ok(Analyzed { spec: spec.clone(), curve, count, frob })
}

/// Analyze every curve, insisting on one field and one point count.
fn analyze_class(specs: &[CurveSpec]) -> Result<Vec<Analyzed>> {
    let all = specs.iter().map(analyze_curve).collect::<Result<Vec<_>>>()?;
    let first = &all[0];
    for other in &all[1..] {
        if other.spec.q != first.spec.q {
            return Err(Error::FieldMismatch(first.spec.q, other.spec.q));
        }
        if other.count != first.count {
            return Err(Error::CountMismatch(first.count.to_string(), other.count.to_string()));
        }
    }
    Ok(all)
}

fn pattern_report(p: &IsoPattern) -> PatternReport {
    PatternReport { modulus: p.modulus(), allowed: p.allowed().to_vec(), text: p.text() }
}

fn prime_reports(p: &IsoPattern) -> Vec<PrimeReport> {
    p.per_prime()
        .iter()
        .map(|pa| PrimeReport { p: pa.p, s: pa.s, e: pa.e, strict: pa.strict, case: pa.case })
        .collect()
}

pub fn cmd_analyze(spec: &CurveSpec) -> Result<Report> {
    let an = analyze_curve(spec)?;
    let g = conductor(&an.curve, &an.frob)?;
    let structure = predicted_group_structure(&an.frob, &g, 1)?;
    Ok(Report {
        input: InputReport { command: "analyze".into(), curves: vec![spec.to_string()], kmax: None },
        frobenius: (&an.frob).into(),
        conductors: vec![g],
        primes: Vec::new(),
        pattern: None,
        per_k: None,
        oracle: None,
        structures: Some(vec![StructureReport {
            curve: spec.to_string(),
            k: 1,
            points: BigUint::from(an.count),
            structure,
        }]),
    })
}

fn comparison(frob: &FrobeniusData, g: BigUint, g2: BigUint, kmax: Option<u64>) -> Result<(IsoPattern, Option<Vec<PerK>>)> {
    let input = ComparisonInput::new(frob.clone(), g.clone(), g2.clone())?;
    let pattern = iso_pattern(&input)?;
    let per_k = kmax
        .map(|kmax| {
            (1..=kmax)
                .map(|k| Ok(PerK { k, gcd: gcd_criterion(frob, &g, &g2, k)?, pattern: pattern_eval(&pattern, k) }))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    Ok((pattern, per_k))
}

pub fn cmd_compare(a: &CurveSpec, b: &CurveSpec, kmax: Option<u64>) -> Result<Report> {
    let class = analyze_class(&[a.clone(), b.clone()])?;
    let frob = &class[0].frob;
    let g = conductor(&class[0].curve, frob)?;
    let g2 = conductor(&class[1].curve, frob)?;
    let (pattern, per_k) = comparison(frob, g.clone(), g2.clone(), kmax)?;
    Ok(Report {
        input: InputReport { command: "compare".into(), curves: vec![a.to_string(), b.to_string()], kmax },
        frobenius: frob.into(),
        conductors: vec![g, g2],
        primes: prime_reports(&pattern),
        pattern: Some(pattern_report(&pattern)),
        per_k,
        oracle: None,
        structures: None,
    })
}

/// Curve-free mode: the pattern from (q, t, g, g2) alone; q may be any
/// prime power.
pub fn cmd_pattern(q: &BigUint, t: &BigInt, g: &BigUint, g2: &BigUint, kmax: Option<u64>) -> Result<Report> {
    let frob = frobenius_from_trace(q, t)?;
    let (pattern, per_k) = comparison(&frob, g.clone(), g2.clone(), kmax)?;
    Ok(Report {
        input: InputReport { command: "pattern".into(), curves: Vec::new(), kmax },
        frobenius: (&frob).into(),
        conductors: vec![g.clone(), g2.clone()],
        primes: prime_reports(&pattern),
        pattern: Some(pattern_report(&pattern)),
        per_k,
        oracle: None,
        structures: None,
    })
}

/// Brute-force group structures over F_{q^k}, k = 1..kmax, against the
/// predicted pattern.
pub fn cmd_oracle(a: &CurveSpec, b: &CurveSpec, kmax: u64, bound: u64) -> Result<Report> {
    if kmax == 0 {
        return Err(Error::Precondition("kmax must be positive".into()));
    }
    let top = BigUint::from(a.q).pow(kmax as u32);
    if top > BigUint::from(bound) {
        return Err(Error::Capacity { size: top.to_string(), bound });
    }
    let class = analyze_class(&[a.clone(), b.clone()])?;
    let frob = &class[0].frob;
    let g = conductor(&class[0].curve, frob)?;
    let g2 = conductor(&class[1].curve, frob)?;
    let (pattern, _) = comparison(frob, g.clone(), g2.clone(), None)?;
    let mut rows = Vec::new();
    for k in 1..=kmax {
        let first = group_structure_over_extension(&class[0].curve, k as usize, bound)?;
        let second = group_structure_over_extension(&class[1].curve, k as usize, bound)?;
        let isomorphic = first == second;
        let predicted = pattern_eval(&pattern, k);
        rows.push(OracleRow { k, first, second, isomorphic, predicted, agree: isomorphic == predicted });
    }
    Ok(Report {
        input: InputReport { command: "oracle".into(), curves: vec![a.to_string(), b.to_string()], kmax: Some(kmax) },
        frobenius: frob.into(),
        conductors: vec![g, g2],
        primes: prime_reports(&pattern),
        pattern: Some(pattern_report(&pattern)),
        per_k: None,
        oracle: Some(rows),
        structures: None,
    })
}

/// Pairwise pattern table over one isogeny class, upper triangle only.
pub fn cmd_table(specs: &[CurveSpec], labels: &[String]) -> Result<String> {
    if specs.len() < 2 {
        return Err(Error::Precondition("a table needs at least two curves".into()));
    }
    if labels.len() != specs.len() {
        return Err(Error::Precondition(format!("{} labels for {} curves", labels.len(), specs.len())));
    }
    let class = analyze_class(specs)?;
    let frob = &class[0].frob;
    let conductors = class.iter().map(|c| conductor(&c.curve, frob)).collect::<Result<Vec<_>>>()?;
    let n = specs.len();
    let mut cells = vec![vec!["--".to_string(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let input = ComparisonInput::new(frob.clone(), conductors[i].clone(), conductors[j].clone())?;
            cells[i][j] = iso_pattern(&input)?.text();
        }
    }
    let mut rows = vec![std::iter::once("≅".to_string()).chain(labels.iter().cloned()).collect::<Vec<_>>()];
    for i in 0..n {
        rows.push(std::iter::once(labels[i].clone()).chain(cells[i].iter().cloned()).collect());
    }
    let width = rows.iter().flatten().map(|c| c.chars().count()).max().unwrap();
    let mut out = String::new();
    for row in rows {
        let line = row
            .iter()
            .map(|c| format!("{c}{}", " ".repeat(width - c.chars().count())))
            .collect::<Vec<_>>()
            .join("  ");
        writeln!(out, "{}", line.trim_end()).unwrap();
    }
    Ok(out)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let f = &self.frobenius;
        for c in &self.input.curves {
            writeln!(out, "curve       {c}").unwrap();
        }
        writeln!(out, "q           {}", f.q).unwrap();
        writeln!(out, "trace       {}", f.t).unwrap();
        let sign = if f.b < BigInt::from(0) { "-" } else { "+" };
        writeln!(out, "frobenius   {} {sign} {}δ  (m = {}, {})", f.a, f.b.magnitude(), f.m, f.delta).unwrap();
        writeln!(out, "conductors  {}", join(&self.conductors)).unwrap();
        if let Some(structures) = &self.structures {
            for s in structures {
                writeln!(out, "points      {} (k = {})", s.points, s.k).unwrap();
                writeln!(out, "structure   {}", s.structure).unwrap();
            }
        }
        for p in &self.primes {
            writeln!(out, "prime       p = {}  s = {}  e = {}  strict = {}  {}", p.p, p.s, p.e, p.strict, p.case).unwrap();
        }
        if let Some(p) = &self.pattern {
            writeln!(out, "pattern     {}  (M = {}, allowed = {{{}}})", p.text, p.modulus, join(&p.allowed)).unwrap();
        }
        if let Some(rows) = &self.per_k {
            for r in rows {
                let mark = if r.gcd == r.pattern { "" } else { "  MISMATCH" };
                writeln!(out, "k = {:<4} {}{mark}", r.k, if r.gcd { "isomorphic" } else { "not isomorphic" }).unwrap();
            }
        }
        if let Some(rows) = &self.oracle {
            for r in rows {
                let mark = if r.agree { "agree" } else { "DISAGREE" };
                writeln!(out, "k = {:<4} {}  |  {}  predicted {}  {mark}", r.k, r.first, r.second, r.predicted).unwrap();
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> CurveSpec {
        s.parse().unwrap()
    }

    #[test]
    fn parses_specs() {
        assert_eq!(spec("3329:49,0"), CurveSpec { q: 3329, a: 49, b: 0 });
        assert_eq!(spec("1031:-49,1100"), CurveSpec { q: 1031, a: 982, b: 69 });
        assert_eq!(spec(" 5 : 1 , 1 ").to_string(), "5:1,1");
        for bad in ["5:1", "5;1,1", "x:1,1", "6:1,1", "5:1,y", ""] {
            assert!(bad.parse::<CurveSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn analyze_examples() {
        let r = cmd_analyze(&spec("3329:49,0")).unwrap();
        assert_eq!(r.frobenius.t, BigInt::from(50));
        assert_eq!((r.frobenius.a.clone(), r.frobenius.b.clone()), (BigInt::from(25), BigInt::from(52)));
        assert_eq!(r.conductors, vec![BigUint::from(1u32)]);
        assert_eq!(cmd_analyze(&spec("3329:1,57")).unwrap().conductors, vec![BigUint::from(52u32)]);
        let r = cmd_analyze(&spec("5:1,1")).unwrap();
        let s = &r.structures.unwrap()[0];
        assert_eq!(s.points, BigUint::from(9u32));
        assert_eq!((s.structure.n1.clone(), s.structure.n2.clone()), (BigUint::from(1u32), BigUint::from(9u32)));
    }

    #[test]
    fn error_codes() {
        assert_eq!(exit_code(&cmd_analyze(&spec("5:0,1")).unwrap_err()), 3);
        assert_eq!(exit_code(&cmd_analyze(&spec("5:0,0")).unwrap_err()), 2);
        let e = cmd_compare(&spec("5:1,1"), &spec("5:2,1"), None).unwrap_err();
        assert_eq!(exit_code(&e), 4);
        let e = cmd_oracle(&spec("5:1,1"), &spec("5:1,1"), 9, 1_000_000).unwrap_err();
        assert_eq!(exit_code(&e), 5);
        let e = cmd_pattern(&BigUint::from(3329u32), &BigInt::from(104), &BigUint::from(3u32), &BigUint::from(1u32), None)
            .unwrap_err();
        assert_eq!(exit_code(&e), 2);
    }

    #[test]
    fn pattern_mode() {
        let r = cmd_pattern(&BigUint::from(3329u32), &BigInt::from(104), &BigUint::from(1u32), &BigUint::from(25u32), Some(8))
            .unwrap();
        let p = r.pattern.as_ref().unwrap();
        assert_eq!((p.modulus, p.allowed.clone(), p.text.as_str()), (4, vec![1, 2, 3], "4 ∤ k"));
        assert!(r.per_k.as_ref().unwrap().iter().all(|row| row.gcd == row.pattern));
        let r = cmd_pattern(&BigUint::from(1031u32), &BigInt::from(-20), &BigUint::from(14u32), &BigUint::from(1u32), None)
            .unwrap();
        assert_eq!(r.pattern.unwrap().text, "2 | k and 3 ∤ k");
        // A prime-power q needs no curve.
        let r = cmd_pattern(&BigUint::from(25u32), &BigInt::from(2), &BigUint::from(1u32), &BigUint::from(2u32), Some(6))
            .unwrap();
        assert!(r.per_k.unwrap().iter().all(|row| row.gcd == row.pattern));
    }

    #[test]
    fn oracle_identical_curves() {
        let r = cmd_oracle(&spec("7:1,3"), &spec("7:1,3"), 3, 1_000_000).unwrap();
        assert!(r.oracle.unwrap().iter().all(|row| row.isomorphic && row.agree));
    }

    #[test]
    fn json_round_trip() {
        let r = cmd_compare(&spec("3329:1,378"), &spec("3329:3,1152"), Some(4)).unwrap();
        assert_eq!(r.pattern.as_ref().unwrap().text, "k odd");
        let json = r.to_json();
        assert_eq!(Report::from_json(&json).unwrap(), r);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        for key in ["input", "frobenius", "conductors", "primes", "pattern", "per_k", "oracle"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["frobenius"]["delta"], "SQRT");
        assert_eq!(v["frobenius"]["b"], "52");
        assert_eq!(v["conductors"][0], "26");
        let r = cmd_analyze(&spec("5:1,1")).unwrap();
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
    }
}

use std::fmt::Write as _;
use std::io::Read;
use std::str::FromStr;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use twistk_core::cyclic::{self, ChernCheck};
use twistk_core::fgab::{self, ElementOrder, FgAbGroup, Homomorphism};
use twistk_core::intlin;
use twistk_core::json::{self as js, JsonError, TowerSpec};
use twistk_core::ktwist::{self, KResult, TwistedSpace};
use twistk_core::towers::{self, CyclicFamily, GradedInverseTower, TorsionWitness};

use crate::{render, ChernArgs, Cli, Family, GlobalArgs, HpArgs, KtwistArgs, ProductArgs, Space, TowerArgs, TowerOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    CheckFailed,
    Unproven,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::CheckFailed => 2,
            Status::Unproven => 3,
        }
    }
}

pub struct Outcome {
    pub json: Value,
    pub table: String,
    pub status: Status,
}

impl Outcome {
    fn new(json: Value, table: String) -> Self {
        Outcome {
            json,
            table,
            status: Status::Ok,
        }
    }

    fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }
}

/// Invalid input of any kind; always exit code 1.
#[derive(Debug)]
pub struct Failure {
    pub message: String,
}

impl Failure {
    pub fn new(message: impl Into<String>) -> Self {
        Failure {
            message: message.into(),
        }
    }
}

macro_rules! failure_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::new(e.to_string())
            }
        }
    )*};
}

failure_from!(
    JsonError,
    fgab::GroupError,
    towers::TowerError,
    ktwist::KTwistError,
    cyclic::CyclicError
);

fn payload(global: &GlobalArgs) -> Result<Value, Failure> {
    let text = match &global.input {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Failure::new(format!("input: cannot read {}: {e}", p.display())))?,
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::new(format!("input: cannot read standard input: {e}")))?;
            s
        }
    };
    serde_json::from_str(&text).map_err(|e| Failure::new(format!("input: malformed JSON: {e}")))
}

fn required<T: Copy>(value: Option<T>, flag: &str, context: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::new(format!("--{flag} is required {context}")))
}

pub fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let g = &cli.global;
    let bound = usize::try_from(g.bound).map_err(|_| Failure::new("--bound is too large"))?;
    match &cli.command {
        crate::Command::Snf => snf(g),
        crate::Command::Group => group(g),
        crate::Command::Hom => hom(g),
        crate::Command::Exact => exact(g),
        crate::Command::Tower(a) => tower(g, a, bound),
        crate::Command::Ktwist(a) => ktwist_cmd(a, bound),
        crate::Command::Hp(a) => hp(a, bound),
        crate::Command::Product(a) => product(a, bound),
        crate::Command::Grid(a) => grid(
            usize::try_from(a.n_max).map_err(|_| Failure::new("--n-max is too large"))?,
            a.level_max,
        ),
        crate::Command::Chern(a) => chern(g, a, bound),
    }
}

fn snf(g: &GlobalArgs) -> Result<Outcome, Failure> {
    let a = js::matrix_from_json(&payload(g)?, "payload")?;
    let d = intlin::snf(&a);
    let factors: Vec<String> = d.factors.iter().map(ToString::to_string).collect();
    let table = format!(
        "invariant factors: {}\nrank: {}\nS =\n{}U =\n{}V =\n{}",
        if factors.is_empty() { "none".into() } else { factors.join(", ") },
        d.rank(),
        d.s,
        d.u,
        d.v
    );
    Ok(Outcome::new(js::snf_to_json(&d), table))
}

fn order_json(g: &FgAbGroup) -> Value {
    g.order().map_or(Value::Null, |o| Value::String(o.to_string()))
}

fn order_text(g: &FgAbGroup) -> String {
    g.order().map_or("infinite".into(), |o| o.to_string())
}

fn group(g: &GlobalArgs) -> Result<Outcome, Failure> {
    let grp = js::group_from_any_json(&payload(g)?, "payload")?;
    let json = json!({
        "group": js::group_to_json(&grp),
        "display": grp.to_string(),
        "order": order_json(&grp),
        "rationalized_rank": grp.rationalized_rank(),
    });
    let table = format!(
        "group: {grp}\norder: {}\nrationalized rank: {}\n",
        order_text(&grp),
        grp.rationalized_rank()
    );
    Ok(Outcome::new(json, table))
}

fn hom(g: &GlobalArgs) -> Result<Outcome, Failure> {
    let f = js::hom_from_json(&payload(g)?, "payload")?;
    let ker = fgab::kernel(&f).group;
    let im = fgab::image(&f).group;
    let coker = fgab::cokernel(&f);
    let json = json!({
        "kernel": js::group_to_json(&ker),
        "image": js::group_to_json(&im),
        "cokernel": js::group_to_json(&coker),
        "injective": f.is_injective(),
        "surjective": f.is_surjective(),
        "isomorphism": f.is_isomorphism(),
    });
    let table = format!(
        "map: {} -> {}\nkernel: {ker}\nimage: {im}\ncokernel: {coker}\ninjective: {}\nsurjective: {}\n",
        f.source(),
        f.target(),
        f.is_injective(),
        f.is_surjective()
    );
    Ok(Outcome::new(json, table))
}

fn exact(g: &GlobalArgs) -> Result<Outcome, Failure> {
    let maps = js::sequence_from_json(&payload(g)?)?;
    let report = fgab::check_exact(&maps)?;
    let mut table = String::new();
    for n in &report.nodes {
        let _ = writeln!(table, "node {}: {} {}", n.node, n.group, if n.exact { "exact" } else { "NOT exact" });
    }
    match report.first_failure {
        None => table.push_str("exact at all nodes\n"),
        Some(k) => {
            let _ = writeln!(table, "not exact at node {k}");
        }
    }
    let status = if report.is_exact() { Status::Ok } else { Status::CheckFailed };
    Ok(Outcome::new(js::exactness_to_json(&report), table).with_status(status))
}

fn builtin_spec(a: &TowerArgs, name: &str) -> Result<TowerSpec, Failure> {
    let mut params: Map<String, Value> = match &a.params {
        Some(text) => match serde_json::from_str(text) {
            Ok(Value::Object(m)) => m,
            _ => return Err(Failure::new("--params: expected a JSON object")),
        },
        None => Map::new(),
    };
    if let Some(l) = a.level {
        params.insert("level".into(), json!(l));
    }
    if let Some(f) = a.factor {
        params.insert("factor".into(), json!(f));
    }
    if let Some(p) = a.prime {
        params.insert("prime".into(), json!(p));
    }
    Ok(TowerSpec::builtin(name, &Value::Object(params), "")?)
}

fn tower(g: &GlobalArgs, a: &TowerArgs, bound: usize) -> Result<Outcome, Failure> {
    let spec = match &a.builtin {
        Some(name) => Some(builtin_spec(a, name)?),
        None => None,
    };
    let from_payload = |v: &Value| TowerSpec::from_json(v, "payload");
    match a.op {
        TowerOp::Lim => {
            let spec = match spec {
                Some(s) => s,
                None => from_payload(&payload(g)?)?,
            };
            let t = spec.inverse(bound)?;
            let d = towers::inverse_limit(&t)?;
            let json = json!({ "tower": t.describe(), "bound": t.bound(), "limit": js::limit_to_json(&d) });
            let table = format!("tower: {}\nbound: {}\nlim = {}\n", t.describe(), t.bound(), render::limit(&d));
            let status = if d.is_unproven() { Status::Unproven } else { Status::Ok };
            Ok(Outcome::new(json, table).with_status(status))
        }
        TowerOp::Lim1 => {
            let spec = match spec {
                Some(s) => s,
                None => from_payload(&payload(g)?)?,
            };
            let t = spec.inverse(bound)?;
            let ml = towers::is_mittag_leffler(&t)?;
            let l1 = towers::lim1(&t)?;
            let json = json!({
                "tower": t.describe(),
                "bound": t.bound(),
                "mittag_leffler": js::ml_verdict_to_json(&ml),
                "lim1": js::lim1_to_json(&l1),
            });
            let table = format!(
                "tower: {}\nbound: {}\nMittag-Leffler: {}\nlim1 = {}\n",
                t.describe(),
                t.bound(),
                render::ml_verdict(&ml),
                render::lim1(&l1)
            );
            let status = if matches!(l1, towers::Lim1Descriptor::Unproven { .. }) {
                Status::Unproven
            } else {
                Status::Ok
            };
            Ok(Outcome::new(json, table).with_status(status))
        }
        TowerOp::Colim => {
            let spec = match spec {
                Some(s) => s,
                None => from_payload(&payload(g)?)?,
            };
            let t = spec.direct(bound)?;
            let d = towers::direct_limit(&t)?;
            let json = json!({ "tower": t.describe(), "bound": t.bound(), "colimit": js::limit_to_json(&d) });
            let table = format!("tower: {}\nbound: {}\ncolim = {}\n", t.describe(), t.bound(), render::limit(&d));
            let status = if d.is_unproven() { Status::Unproven } else { Status::Ok };
            Ok(Outcome::new(json, table).with_status(status))
        }
        TowerOp::Milnor => {
            let graded = match spec {
                Some(s) => towers::milnor_assemble_total(&s.inverse(bound)?)?,
                None => {
                    let v = payload(g)?;
                    match (v.get("even"), v.get("odd")) {
                        (Some(e), Some(o)) => {
                            let even = TowerSpec::from_json(e, "payload.even")?.inverse(bound)?;
                            let odd = TowerSpec::from_json(o, "payload.odd")?.inverse(bound)?;
                            towers::milnor_assemble(&GradedInverseTower::new(even, odd)?)?
                        }
                        _ => towers::milnor_assemble_total(&from_payload(&v)?.inverse(bound)?)?,
                    }
                }
            };
            let json = json!({ "graded": js::kgraded_to_json(&graded) });
            let table = render::kgraded(&graded, "K");
            let status = if graded.is_unproven() { Status::Unproven } else { Status::Ok };
            Ok(Outcome::new(json, table).with_status(status))
        }
    }
}

fn space_from_args(space: Space, n: Option<usize>, level: Option<u64>, twist: Option<&str>) -> Result<TwistedSpace, Failure> {
    Ok(match space {
        Space::Su => TwistedSpace::su(
            required(n, "n", "for --space su")?,
            required(level, "level", "for --space su")?,
        )?,
        Space::SuInf => TwistedSpace::su_infinite(required(level, "level", "for --space su-inf")?)?,
        Space::S3 => {
            let t = twist.ok_or_else(|| Failure::new("--twist is required for --space s3"))?;
            let m = BigInt::from_str(t).map_err(|_| Failure::new(format!("--twist: `{t}` is not an integer")))?;
            TwistedSpace::sphere3(m)?
        }
        Space::S3Union => TwistedSpace::sphere_union(),
    })
}

fn kresult_outcome(space: &TwistedSpace, k: &KResult, theory: &str) -> Outcome {
    let mut json = js::kresult_to_json(k);
    json["space"] = json!(space.describe());
    json["theory"] = json!(theory);
    let prefix = if theory == "K-theory" { "K^" } else { "K_" };
    let mut table = format!("{theory} of {}\n", space.describe());
    table.push_str(&render::kgraded(&k.graded, prefix));
    table.push_str("provenance:\n");
    for p in &k.provenance {
        let _ = writeln!(table, "  - {p}");
    }
    let status = if k.is_unproven() { Status::Unproven } else { Status::Ok };
    Outcome::new(json, table).with_status(status)
}

fn ktwist_cmd(a: &KtwistArgs, bound: usize) -> Result<Outcome, Failure> {
    if let Some(t) = &a.table {
        if t[0] < 2 || t[1] < 2 {
            return Err(Failure::new("--table: N_MAX and LEVEL_MAX must be at least 2"));
        }
        return grid(t[0], t[1] as u64);
    }
    let space = space_from_args(
        a.space.expect("clap requires --space without --table"),
        a.n,
        a.level,
        a.twist.as_deref(),
    )?;
    let (k, theory) = if a.homology {
        (ktwist::twisted_khomology(&space, bound)?, "K-homology")
    } else {
        (ktwist::twisted_k(&space, bound)?, "K-theory")
    };
    let mut out = kresult_outcome(&space, &k, theory);
    if let (Some(n), TwistedSpace::SphereDisjointUnion(family)) = (a.truncate, &space) {
        let grp = towers::truncated_product(family, n)?;
        out.json["truncation"] = json!({ "n": n, "group": js::group_to_json(&grp) });
        let _ = writeln!(out.table, "truncation at n = {n}: {grp}");
    }
    Ok(out)
}

fn hp(a: &HpArgs, bound: usize) -> Result<Outcome, Failure> {
    if a.twisted {
        let space = match a.space {
            Space::Su | Space::SuInf => space_from_args(a.space, a.n, a.level, None)?,
            _ => return Err(Failure::new("--space: twisted HP is computed for su and su-inf only")),
        };
        let hp = cyclic::twisted_hp(&space, bound)?;
        let k = ktwist::twisted_k(&space, bound)?;
        let (check_json, check_text, status) = if k.is_unproven() {
            (json!("unproven"), "unproven (twisted K not certified)".to_string(), Status::Unproven)
        } else {
            chern_json(&cyclic::chern_rank_check(&k, &hp.dims.total())?)
        };
        let json = json!({
            "space": space.describe(),
            "dims": js::dims_to_json(&hp.dims),
            "provenance": hp.provenance,
            "chern_check": check_json,
        });
        let mut table = format!("twisted HP of {}: {}\n", space.describe(), render::dims(&hp.dims));
        for p in &hp.provenance {
            let _ = writeln!(table, "  - {p}");
        }
        let _ = writeln!(table, "Chern rank check: {check_text}");
        return Ok(Outcome::new(json, table).with_status(status));
    }
    match a.space {
        Space::Su => {
            let n = required(a.n, "n", "for --space su")?;
            let alg = cyclic::su_de_rham(n)?;
            let d = cyclic::graded_dims(&alg);
            let json = json!({
                "n": n,
                "generator_degrees": alg.generator_degrees(),
                "dims": js::dims_to_json(&d),
            });
            let degrees: Vec<String> = alg.generator_degrees().iter().map(|d| format!("x{d}")).collect();
            let table = format!("HP of SU({n}) = Λ({}): {}\n", degrees.join(", "), render::dims(&d));
            Ok(Outcome::new(json, table))
        }
        Space::SuInf => {
            let t = required(a.truncate, "truncate", "for --space su-inf")?;
            let r = cyclic::hp_su_infinity(t)?;
            let mut table = String::new();
            for (n, d) in &r.levels {
                let _ = writeln!(table, "SU({n}): {}", render::dims(d));
            }
            let _ = writeln!(table, "restrictions surjective: {}", r.restrictions_surjective);
            let _ = writeln!(table, "lim1 = {}", render::lim1(&r.lim1));
            let _ = writeln!(table, "limit: {}", r.limit);
            Ok(Outcome::new(js::hp_tower_to_json(&r), table))
        }
        _ => Err(Failure::new("--space: HP is computed for su and su-inf only")),
    }
}

fn chern_json(c: &ChernCheck) -> (Value, String, Status) {
    match c {
        ChernCheck::Pass => (json!("pass"), "pass".into(), Status::Ok),
        ChernCheck::Fail { k_rank, hp_dim } => (
            json!({ "fail": { "k_rank": k_rank, "hp_dim": hp_dim.to_string() } }),
            format!("FAIL: rational rank of K is {k_rank}, HP has dimension {hp_dim}"),
            Status::CheckFailed,
        ),
    }
}

fn chern(g: &GlobalArgs, a: &ChernArgs, bound: usize) -> Result<Outcome, Failure> {
    let (label, k, hp_dim) = match a.space {
        Some(space) => {
            let space = space_from_args(space, a.n, a.level, None)?;
            let hp = cyclic::twisted_hp(&space, bound)?;
            (space.describe(), ktwist::twisted_k(&space, bound)?, hp.dims.total())
        }
        None => {
            let v = payload(g)?;
            let obj = v.as_object().ok_or_else(|| Failure::new("field `payload`: expected an object"))?;
            let grp = js::group_from_any_json(
                obj.get("k_total").ok_or_else(|| Failure::new("field `payload.k_total`: missing"))?,
                "payload.k_total",
            )?;
            let dim = js::int_from_json(
                obj.get("hp_dim").ok_or_else(|| Failure::new("field `payload.hp_dim`: missing"))?,
                "payload.hp_dim",
            )?;
            let dim = dim
                .to_biguint()
                .ok_or_else(|| Failure::new("field `payload.hp_dim`: must be nonnegative"))?;
            (format!("K = {grp}"), KResult::from_total(grp, "given"), dim)
        }
    };
    if k.is_unproven() {
        let json = json!({ "input": label, "check": "unproven" });
        return Ok(Outcome::new(json, format!("{label}: twisted K not certified\n")).with_status(Status::Unproven));
    }
    let (check_json, check_text, status) = chern_json(&cyclic::chern_rank_check(&k, &hp_dim)?);
    let json = json!({ "input": label, "hp_dim": hp_dim.to_string(), "check": check_json });
    let table = format!("{label}, HP dimension {hp_dim}: {check_text}\n");
    Ok(Outcome::new(json, table).with_status(status))
}

fn product(a: &ProductArgs, bound: usize) -> Result<Outcome, Failure> {
    let family = match a.family {
        Family::Identity => CyclicFamily::identity(a.first),
        Family::Constant => {
            let m = a.m.as_deref().ok_or_else(|| Failure::new("--m is required for --family constant"))?;
            let m = BigInt::from_str(m).map_err(|_| Failure::new(format!("--m: `{m}` is not an integer")))?;
            if m < BigInt::from(1) {
                return Err(Failure::new("--m: cyclic orders must be at least 1"));
            }
            CyclicFamily::constant(a.first, m)
        }
    };
    let n = a.n;
    if n < a.first {
        return Err(Failure::new(format!("--n: truncation {n} is below the first index {}", a.first)));
    }
    let grp = towers::truncated_product(&family, n)?;
    let ones = towers::all_ones_order(&family, n)?;
    let witness = towers::unbounded_torsion_witness(&family, bound)?;

    // 0 → Z/m(n+1) → P_{n+1} → P_n → 0
    let incl = towers::last_factor_inclusion(&family, n)?;
    let proj = towers::truncation_projection(&family, n)?;
    let trivial = FgAbGroup::trivial();
    let seq = [
        Homomorphism::zero(&trivial, incl.source()),
        incl,
        proj.clone(),
        Homomorphism::zero(proj.target(), &trivial),
    ];
    let sequence_exact = fgab::check_exact(&seq)?.is_exact();

    let ones_text = match &ones {
        ElementOrder::Finite(o) => o.to_string(),
        ElementOrder::Infinite => "infinite".into(),
    };
    let (witness_json, witness_text) = match &witness {
        TorsionWitness::Witness(jumps) => (
            json!({
                "kind": "witness",
                "jumps": jumps.iter().map(|(n, o)| json!({ "n": n, "order": o.to_string() })).collect::<Vec<_>>(),
            }),
            jumps.iter().map(|(_, o)| o.to_string()).collect::<Vec<_>>().join(", "),
        ),
        TorsionWitness::None => (json!({ "kind": "none" }), "none".into()),
    };
    let json = json!({
        "family": { "first": family.first(), "order": family.label() },
        "n": n,
        "truncation": js::group_to_json(&grp),
        "all_ones_order": ones_text,
        "witness": witness_json,
        "bound": bound,
        "projection_sequence_exact": sequence_exact,
    });
    let table = format!(
        "truncation of product of Z/{} over {} <= k <= {n}: {grp}\norder of (1, ..., 1): {ones_text}\n\
         orders of (1, 1, ...) up to {bound}: {witness_text}\n0 -> Z/m({}) -> P_{} -> P_{n} -> 0 exact: {sequence_exact}\n",
        family.label(),
        family.first(),
        n + 1,
        n + 1
    );
    let status = if sequence_exact { Status::Ok } else { Status::CheckFailed };
    Ok(Outcome::new(json, table).with_status(status))
}

pub fn grid(n_max: usize, level_max: u64) -> Result<Outcome, Failure> {
    let rows = (1..=level_max)
        .into_par_iter()
        .map(|l| ktwist::divisibility_table(l, n_max))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = format!("{:>6} |", "l");
    for n in 2..=n_max {
        let _ = write!(table, " {:>6}", format!("n={n}"));
    }
    table.push_str(" | divisibility | first-1\n");
    let mut json_rows = Vec::new();
    let mut status = Status::Ok;
    for r in &rows {
        let first = r.first_one.map_or(format!("unproven@{n_max}"), |n| n.to_string());
        let _ = write!(table, "{:>6} |", r.level);
        for (_, c) in &r.values {
            let _ = write!(table, " {c:>6}");
        }
        let verdict = if r.divisibility_holds { "ok" } else { "FAIL" };
        let _ = writeln!(table, " | {verdict:>12} | {first}");
        json_rows.push(json!({
            "level": r.level,
            "values": r.values.iter().map(|(_, c)| c.to_string()).collect::<Vec<_>>(),
            "divisibility": verdict,
            "first_one": r.first_one.map_or(json!(format!("unproven@{n_max}")), |n| json!(n)),
        }));
        if !r.divisibility_holds {
            status = Status::CheckFailed;
        } else if r.first_one.is_none() && status == Status::Ok {
            status = Status::Unproven;
        }
    }
    let json = json!({ "n_max": n_max, "level_max": level_max, "rows": json_rows });
    Ok(Outcome::new(json, table).with_status(status))
}

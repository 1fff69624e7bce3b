//! JSON forms of matrices, groups, homomorphisms, sequences, towers and
//! verdicts. Integers of unbounded size are written as decimal strings and
//! read from either strings or JSON numbers. Objects use sorted keys, so a
//! value printed, parsed and printed again is byte-identical.

use std::str::FromStr;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::cyclic::{GradedDims, HpTowerReport};
use crate::fgab::{ExactnessReport, FgAbGroup, Homomorphism};
use crate::intlin::{IntMatrix, SmithDecomposition};
use crate::ktwist::KResult;
use crate::towers::{
    ConstantLevels, CyclicFamily, CyclicReductions, DirectTower, InverseTower, KGradedGroup, KGroup,
    Lim1Descriptor, LimitDescriptor, MlFailure, MlVerdict, PrefixLevels, ScaledIntegers, TailClass,
    TrivialReason,
};

/// A malformed or out-of-range value, located by its path in the document.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("field `{field}`: {message}")]
pub struct JsonError {
    pub field: String,
    pub message: String,
}

fn err(field: &str, message: impl ToString) -> JsonError {
    JsonError {
        field: field.to_string(),
        message: message.to_string(),
    }
}

fn path(parent: &str, key: &str) -> String {
    if parent.is_empty() {
        key.to_string()
    } else {
        format!("{parent}.{key}")
    }
}

fn object<'a>(v: &'a Value, field: &str) -> Result<&'a Map<String, Value>, JsonError> {
    v.as_object().ok_or_else(|| err(field, "expected an object"))
}

fn array<'a>(v: &'a Value, field: &str) -> Result<&'a Vec<Value>, JsonError> {
    v.as_array().ok_or_else(|| err(field, "expected an array"))
}

fn required<'a>(obj: &'a Map<String, Value>, parent: &str, key: &str) -> Result<&'a Value, JsonError> {
    obj.get(key).ok_or_else(|| err(&path(parent, key), "missing"))
}

pub fn int_from_json(v: &Value, field: &str) -> Result<BigInt, JsonError> {
    match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(BigInt::from_str(&n.to_string()).expect("integer")),
        Value::String(s) => BigInt::from_str(s.trim()).map_err(|_| err(field, format!("`{s}` is not an integer"))),
        _ => Err(err(field, "expected an integer or a decimal string")),
    }
}

pub fn usize_from_json(v: &Value, field: &str) -> Result<usize, JsonError> {
    usize::try_from(int_from_json(v, field)?).map_err(|_| err(field, "expected a nonnegative integer"))
}

fn int_to_json(n: &BigInt) -> Value {
    Value::String(n.to_string())
}

fn ints_to_json(ns: &[BigInt]) -> Value {
    Value::Array(ns.iter().map(int_to_json).collect())
}

pub fn matrix_to_json(m: &IntMatrix) -> Value {
    let entries: Vec<Value> = (0..m.rows()).map(|i| ints_to_json(m.row(i))).collect();
    json!({ "rows": m.rows(), "cols": m.cols(), "entries": entries })
}

pub fn matrix_from_json(v: &Value, field: &str) -> Result<IntMatrix, JsonError> {
    let obj = object(v, field)?;
    let rows = usize_from_json(required(obj, field, "rows")?, &path(field, "rows"))?;
    let cols = usize_from_json(required(obj, field, "cols")?, &path(field, "cols"))?;
    let entries_field = path(field, "entries");
    let given = array(required(obj, field, "entries")?, &entries_field)?;
    if given.len() != rows {
        return Err(err(&entries_field, format!("expected {rows} rows, found {}", given.len())));
    }
    let mut entries = Vec::with_capacity(rows * cols);
    for (i, row) in given.iter().enumerate() {
        let row_field = format!("{entries_field}[{i}]");
        let row = array(row, &row_field)?;
        if row.len() != cols {
            return Err(err(&row_field, format!("expected {cols} entries, found {}", row.len())));
        }
        for (j, x) in row.iter().enumerate() {
            entries.push(int_from_json(x, &format!("{row_field}[{j}]"))?);
        }
    }
    IntMatrix::new(rows, cols, entries).map_err(|e| err(field, e))
}

pub fn group_to_json(g: &FgAbGroup) -> Value {
    json!({ "free_rank": g.free_rank(), "torsion": ints_to_json(g.torsion()) })
}

fn group_parts(v: &Value, field: &str) -> Result<(usize, Vec<BigInt>), JsonError> {
    let obj = object(v, field)?;
    let free_rank = usize_from_json(required(obj, field, "free_rank")?, &path(field, "free_rank"))?;
    let torsion_field = path(field, "torsion");
    let torsion = match obj.get("torsion") {
        None => Vec::new(),
        Some(t) => array(t, &torsion_field)?
            .iter()
            .enumerate()
            .map(|(i, x)| int_from_json(x, &format!("{torsion_field}[{i}]")))
            .collect::<Result<_, _>>()?,
    };
    Ok((free_rank, torsion))
}

/// A group in canonical form: `1 < d_1 | d_2 | ...`.
pub fn group_from_json(v: &Value, field: &str) -> Result<FgAbGroup, JsonError> {
    let (free_rank, torsion) = group_parts(v, field)?;
    FgAbGroup::new(free_rank, torsion).map_err(|e| err(&path(field, "torsion"), e))
}

/// A group given by any list of positive cyclic orders, or by a relation
/// matrix under the key `relations`; returned in canonical form.
pub fn group_from_any_json(v: &Value, field: &str) -> Result<FgAbGroup, JsonError> {
    let obj = object(v, field)?;
    if let Some(rel) = obj.get("relations") {
        return Ok(FgAbGroup::from_presentation(&matrix_from_json(rel, &path(field, "relations"))?));
    }
    let (free_rank, torsion) = group_parts(v, field)?;
    let torsion_field = path(field, "torsion");
    if let Some(i) = torsion.iter().position(|d| d <= &BigInt::from(0)) {
        return Err(err(&format!("{torsion_field}[{i}]"), "cyclic orders must be positive"));
    }
    Ok(FgAbGroup::free(free_rank).direct_sum(&FgAbGroup::from_cyclic_orders(&torsion)))
}

pub fn hom_to_json(f: &Homomorphism) -> Value {
    json!({
        "source": group_to_json(f.source()),
        "target": group_to_json(f.target()),
        "matrix": matrix_to_json(f.matrix()),
    })
}

pub fn hom_from_json(v: &Value, field: &str) -> Result<Homomorphism, JsonError> {
    let obj = object(v, field)?;
    let source = group_from_json(required(obj, field, "source")?, &path(field, "source"))?;
    let target = group_from_json(required(obj, field, "target")?, &path(field, "target"))?;
    let matrix = matrix_from_json(required(obj, field, "matrix")?, &path(field, "matrix"))?;
    Homomorphism::new(source, target, matrix).map_err(|e| err(field, e))
}

fn homs_from_json(v: &Value, field: &str) -> Result<Vec<Homomorphism>, JsonError> {
    array(v, field)?
        .iter()
        .enumerate()
        .map(|(i, f)| hom_from_json(f, &format!("{field}[{i}]")))
        .collect()
}

pub fn sequence_from_json(v: &Value) -> Result<Vec<Homomorphism>, JsonError> {
    let obj = object(v, "")?;
    homs_from_json(required(obj, "", "maps")?, "maps")
}

pub fn sequence_to_json(maps: &[Homomorphism]) -> Value {
    json!({ "maps": maps.iter().map(hom_to_json).collect::<Vec<_>>() })
}

pub fn snf_to_json(d: &SmithDecomposition) -> Value {
    json!({
        "u": matrix_to_json(&d.u),
        "s": matrix_to_json(&d.s),
        "v": matrix_to_json(&d.v),
        "factors": ints_to_json(&d.factors),
        "rank": d.rank(),
    })
}

pub fn exactness_to_json(r: &ExactnessReport) -> Value {
    let nodes: Vec<Value> = r
        .nodes
        .iter()
        .map(|n| json!({ "node": n.node, "group": group_to_json(&n.group), "exact": n.exact }))
        .collect();
    json!({ "exact": r.is_exact(), "first_failure": r.first_failure, "nodes": nodes })
}

/// Where a tower's levels come from.
#[derive(Debug, Clone)]
pub enum TowerSpec {
    /// `(Z, ×factor)`.
    ScaledIntegers { factor: BigInt },
    /// `Z/p^n` with reductions.
    CyclicReductions { prime: BigInt },
    Constant { base: usize, group: FgAbGroup },
    /// Levels of the `SU(∞)` twisted K-theory tower.
    SuTwisted { level: u64 },
    Prefix {
        base: usize,
        groups: Vec<FgAbGroup>,
        maps: Vec<Homomorphism>,
        tail: String,
    },
}

pub const BUILTIN_TOWERS: [&str; 4] = ["z-times-2", "z-mod-2n", "constant", "su-twisted"];

impl TowerSpec {
    /// A builtin tower by name, with parameters from a JSON object. `parent`
    /// locates the object holding `builtin` and `params`.
    pub fn builtin(name: &str, params: &Value, parent: &str) -> Result<Self, JsonError> {
        let field = &path(parent, "params");
        let empty = Map::new();
        let params_obj = match params {
            Value::Null => &empty,
            p => object(p, field)?,
        };
        let get_int = |key: &str, default: i64| -> Result<BigInt, JsonError> {
            params_obj
                .get(key)
                .map_or(Ok(BigInt::from(default)), |v| int_from_json(v, &path(field, key)))
        };
        Ok(match name {
            "z-times-2" => TowerSpec::ScaledIntegers {
                factor: get_int("factor", 2)?,
            },
            "z-mod-2n" => {
                let prime = get_int("prime", 2)?;
                if prime < BigInt::from(2) {
                    return Err(err(&path(field, "prime"), "must be at least 2"));
                }
                TowerSpec::CyclicReductions { prime }
            }
            "constant" => TowerSpec::Constant {
                base: usize::try_from(get_int("base", 0)?).map_err(|_| err(&path(field, "base"), "must be nonnegative"))?,
                group: group_from_json(required(params_obj, field, "group")?, &path(field, "group"))?,
            },
            "su-twisted" => {
                let level = u64::try_from(get_int("level", 0)?)
                    .ok()
                    .filter(|&l| l >= 1)
                    .ok_or_else(|| err(&path(field, "level"), "must be a positive integer"))?;
                TowerSpec::SuTwisted { level }
            }
            other => {
                return Err(err(
                    &path(parent, "builtin"),
                    format!("unknown tower `{other}`; expected one of {}", BUILTIN_TOWERS.join(", ")),
                ))
            }
        })
    }

    pub fn from_json(v: &Value, field: &str) -> Result<Self, JsonError> {
        let obj = object(v, field)?;
        if let Some(name) = obj.get("builtin") {
            let name = name.as_str().ok_or_else(|| err(&path(field, "builtin"), "expected a string"))?;
            return Self::builtin(name, obj.get("params").unwrap_or(&Value::Null), field);
        }
        let groups_field = path(field, "prefix");
        let groups = array(required(obj, field, "prefix")?, &groups_field)?
            .iter()
            .enumerate()
            .map(|(i, g)| group_from_json(g, &format!("{groups_field}[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let maps = homs_from_json(required(obj, field, "maps")?, &path(field, "maps"))?;
        let tail_field = path(field, "tail");
        let tail = required(obj, field, "tail")?
            .as_str()
            .filter(|t| ["constant", "finite", "general"].contains(t))
            .ok_or_else(|| err(&tail_field, "expected \"constant\", \"finite\" or \"general\""))?
            .to_string();
        let base = obj.get("base").map_or(Ok(0), |b| usize_from_json(b, &path(field, "base")))?;
        Ok(TowerSpec::Prefix {
            base,
            groups,
            maps,
            tail,
        })
    }

    fn prefix_tail(base: usize, len: usize, tail: &str) -> TailClass {
        match tail {
            "constant" => TailClass::EventuallyConstant(base + len - 1),
            "finite" => TailClass::LevelwiseFinite,
            _ => TailClass::General,
        }
    }

    pub fn inverse(&self, bound: usize) -> Result<InverseTower, JsonError> {
        let built = match self {
            TowerSpec::ScaledIntegers { factor } => {
                InverseTower::new(ScaledIntegers::new(factor.clone()), TailClass::General, bound)
            }
            TowerSpec::CyclicReductions { prime } => {
                InverseTower::new(CyclicReductions::new(prime.clone()), TailClass::LevelwiseFinite, bound)
            }
            TowerSpec::Constant { base, group } => InverseTower::new(
                ConstantLevels::new(*base, group.clone()),
                TailClass::EventuallyConstant(*base),
                bound,
            ),
            TowerSpec::SuTwisted { level } => {
                return crate::ktwist::su_inverse_tower(*level, bound).map_err(|e| err("tower", e))
            }
            TowerSpec::Prefix {
                base,
                groups,
                maps,
                tail,
            } => PrefixLevels::inverse(*base, groups.clone(), maps.clone()).and_then(|p| {
                InverseTower::new(p, Self::prefix_tail(*base, groups.len(), tail), bound)
            }),
        };
        built.map_err(|e| err("tower", e))
    }

    pub fn direct(&self, bound: usize) -> Result<DirectTower, JsonError> {
        let built = match self {
            TowerSpec::ScaledIntegers { factor } => {
                DirectTower::new(ScaledIntegers::new(factor.clone()), TailClass::General, bound)
            }
            TowerSpec::CyclicReductions { .. } => {
                return Err(err("tower.builtin", "`z-mod-2n` has reduction maps only; it is not a direct system"))
            }
            TowerSpec::Constant { base, group } => DirectTower::new(
                ConstantLevels::new(*base, group.clone()),
                TailClass::EventuallyConstant(*base),
                bound,
            ),
            TowerSpec::SuTwisted { level } => {
                return crate::ktwist::su_direct_tower(*level, bound).map_err(|e| err("tower", e))
            }
            TowerSpec::Prefix {
                base,
                groups,
                maps,
                tail,
            } => PrefixLevels::direct(*base, groups.clone(), maps.clone())
                .and_then(|p| DirectTower::new(p, Self::prefix_tail(*base, groups.len(), tail), bound)),
        };
        built.map_err(|e| err("tower", e))
    }
}

fn ml_failure_to_json(w: &MlFailure) -> Value {
    let indices: Vec<Value> = w
        .indices
        .iter()
        .map(|i| i.as_ref().map_or(Value::Null, int_to_json))
        .collect();
    json!({ "level": w.level, "depth": w.depth, "indices": indices })
}

pub fn ml_verdict_to_json(v: &MlVerdict) -> Value {
    match v {
        MlVerdict::VerifiedUpTo(b) => json!({ "kind": "verified_up_to", "bound": b }),
        MlVerdict::FailedAt(w) => json!({ "kind": "failed_at", "witness": ml_failure_to_json(w) }),
        MlVerdict::ForcedByRule(r) => json!({ "kind": "forced_by_rule", "rule": r.name() }),
    }
}

pub fn lim1_to_json(d: &Lim1Descriptor) -> Value {
    match d {
        Lim1Descriptor::Zero(r) => json!({ "kind": "zero", "rule": r.name() }),
        Lim1Descriptor::NonzeroUncomputed(w) => {
            json!({ "kind": "nonzero_uncomputed", "witness": ml_failure_to_json(w) })
        }
        Lim1Descriptor::Unproven { bound } => json!({ "kind": "unproven", "bound": bound }),
    }
}

pub fn limit_to_json(d: &LimitDescriptor) -> Value {
    match d {
        LimitDescriptor::ExactGroup { group, note } => {
            json!({ "kind": "exact", "group": group_to_json(group), "note": note })
        }
        LimitDescriptor::Trivial(TrivialReason::CofinalTriviality { from_level, bound }) => json!({
            "kind": "trivial",
            "reason": { "kind": "cofinal_triviality", "from_level": from_level, "bound": bound },
        }),
        LimitDescriptor::Trivial(TrivialReason::ElementsDie { deaths, bound }) => {
            let deaths: Vec<Value> = deaths
                .iter()
                .map(|(l, d)| json!({ "level": l, "dead_at": d }))
                .collect();
            json!({
                "kind": "trivial",
                "reason": { "kind": "elements_die", "deaths": deaths, "bound": bound },
            })
        }
        LimitDescriptor::ProfiniteNontrivial { stable_orders } => {
            let orders: Vec<Value> = stable_orders
                .iter()
                .map(|(l, o)| json!({ "level": l, "order": int_to_json(o) }))
                .collect();
            json!({ "kind": "profinite_nontrivial", "stable_orders": orders })
        }
        LimitDescriptor::Unrepresentable { reason, lim, lim1 } => json!({
            "kind": "unrepresentable",
            "reason": reason,
            "lim": limit_to_json(lim),
            "lim1": lim1_to_json(lim1),
        }),
        LimitDescriptor::Unproven { bound } => json!({ "kind": "unproven", "bound": bound }),
    }
}

fn family_to_json(f: &CyclicFamily) -> Value {
    json!({ "first": f.first(), "order": f.label() })
}

pub fn kgroup_to_json(k: &KGroup) -> Value {
    match k {
        KGroup::Limit(d) => limit_to_json(d),
        KGroup::Product(f) => json!({ "kind": "product", "family": family_to_json(f) }),
        KGroup::Sum(f) => json!({ "kind": "sum", "family": family_to_json(f) }),
    }
}

pub fn kgraded_to_json(k: &KGradedGroup) -> Value {
    match k {
        KGradedGroup::Split { even, odd } => {
            json!({ "kind": "split", "even": kgroup_to_json(even), "odd": kgroup_to_json(odd) })
        }
        KGradedGroup::Total(t) => json!({ "kind": "total", "total": kgroup_to_json(t) }),
    }
}

pub fn kresult_to_json(k: &KResult) -> Value {
    let mut v = json!({ "graded": kgraded_to_json(&k.graded), "provenance": k.provenance });
    if let Some(g) = k.graded.total_group() {
        v["k_total"] = group_to_json(&g);
    }
    v
}

pub fn dims_to_json(d: &GradedDims) -> Value {
    json!({ "even": d.even.to_string(), "odd": d.odd.to_string() })
}

pub fn hp_tower_to_json(r: &HpTowerReport) -> Value {
    let levels: Vec<Value> = r
        .levels
        .iter()
        .map(|(n, d)| json!({ "n": n, "dims": dims_to_json(d) }))
        .collect();
    json!({
        "truncation": r.truncation,
        "levels": levels,
        "restrictions_surjective": r.restrictions_surjective,
        "lim1": lim1_to_json(&r.lim1),
        "dims_unbounded": r.dims_unbounded,
        "limit": r.limit,
    })
}

/// Pretty output with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values are serializable");
    s.push('\n');
    s
}

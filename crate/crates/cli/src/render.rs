use twistk_core::cyclic::GradedDims;
use twistk_core::towers::{KGradedGroup, KGroup, Lim1Descriptor, LimitDescriptor, MlFailure, MlVerdict, TrivialReason};

fn indices(w: &MlFailure) -> String {
    w.indices
        .iter()
        .map(|i| i.as_ref().map_or("inf".to_string(), ToString::to_string))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn ml_verdict(v: &MlVerdict) -> String {
    match v {
        MlVerdict::VerifiedUpTo(b) => format!("image chains stable up to bound {b}"),
        MlVerdict::FailedAt(w) => format!(
            "fails at level {}: image indices over {} steps are {}",
            w.level,
            w.depth,
            indices(w)
        ),
        MlVerdict::ForcedByRule(r) => format!("holds by rule {}", r.name()),
    }
}

pub fn lim1(d: &Lim1Descriptor) -> String {
    match d {
        Lim1Descriptor::Zero(r) => format!("0 (rule {})", r.name()),
        Lim1Descriptor::NonzeroUncomputed(w) => format!(
            "nonzero, not computed (witness level {}; indices {})",
            w.level,
            indices(w)
        ),
        Lim1Descriptor::Unproven { bound } => format!("unproven within bound {bound}"),
    }
}

pub fn limit(d: &LimitDescriptor) -> String {
    match d {
        LimitDescriptor::ExactGroup { group, note } => format!("{group} ({note})"),
        LimitDescriptor::Trivial(TrivialReason::CofinalTriviality { from_level, bound }) => {
            format!("0 (every level from {from_level} to {bound} is trivial)")
        }
        LimitDescriptor::Trivial(TrivialReason::ElementsDie { deaths, bound }) => {
            let last = deaths.iter().map(|&(_, d)| d).max().unwrap_or(0);
            format!(
                "0 (every element of levels {}..{} dies by level {last}; bound {bound})",
                deaths.first().map_or(0, |d| d.0),
                deaths.last().map_or(0, |d| d.0)
            )
        }
        LimitDescriptor::ProfiniteNontrivial { stable_orders } => {
            let orders: Vec<String> = stable_orders.iter().map(|(_, o)| o.to_string()).collect();
            format!("nontrivial profinite group (stable image orders {})", orders.join(", "))
        }
        LimitDescriptor::Unrepresentable { reason, lim, lim1: l1 } => {
            format!("unrepresentable: {reason}; lim = {}; lim1 = {}", limit(lim), lim1(l1))
        }
        LimitDescriptor::Unproven { bound } => format!("unproven within bound {bound}"),
    }
}

pub fn kgroup(k: &KGroup) -> String {
    match k {
        KGroup::Limit(d) => limit(d),
        KGroup::Product(f) => format!("product of Z/{} over n >= {}", f.label(), f.first()),
        KGroup::Sum(f) => format!("direct sum of Z/{} over n >= {}", f.label(), f.first()),
    }
}

pub fn kgraded(k: &KGradedGroup, prefix: &str) -> String {
    match k {
        KGradedGroup::Split { even, odd } => {
            format!("{prefix}0 = {}\n{prefix}1 = {}\n", kgroup(even), kgroup(odd))
        }
        KGradedGroup::Total(t) => format!("{prefix}0 + {prefix}1 = {}\n", kgroup(t)),
    }
}

pub fn dims(d: &GradedDims) -> String {
    format!("even {}, odd {}", d.even, d.odd)
}

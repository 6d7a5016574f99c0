use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{McdaError, NodeId, Result};

/// Coefficients must sum to one within this tolerance. Parameters outside it
/// are rejected rather than renormalised.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Unordered pair of distinct children, stored in sorted order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChildPair(NodeId, NodeId);

impl ChildPair {
    pub fn new(a: impl Into<NodeId>, b: impl Into<NodeId>) -> Result<Self> {
        let (a, b) = (a.into(), b.into());
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(ChildPair(a, b)),
            std::cmp::Ordering::Greater => Ok(ChildPair(b, a)),
            std::cmp::Ordering::Equal => Err(McdaError::InvalidParams {
                node: None,
                reason: format!("pair ({a}, {b}) must reference two distinct children"),
            }),
        }
    }

    pub fn first(&self) -> &str {
        &self.0
    }

    pub fn second(&self) -> &str {
        &self.1
    }

    pub fn contains(&self, id: &str) -> bool {
        self.0 == id || self.1 == id
    }

    /// The other member of the pair, if `id` is one of them.
    pub fn other(&self, id: &str) -> Option<&str> {
        if self.0 == id {
            Some(&self.1)
        } else if self.1 == id {
            Some(&self.0)
        } else {
            None
        }
    }
}

impl fmt::Display for ChildPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.0, self.1)
    }
}

/// JSON has no tuple keys; pair maps travel as `[{"pair": [a, b], "weight": w}]`.
pub(crate) mod pair_map {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        pair: [NodeId; 2],
        weight: f64,
    }

    pub fn serialize<S: Serializer>(map: &BTreeMap<ChildPair, f64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(map.iter().map(|(p, &w)| Entry { pair: [p.0.clone(), p.1.clone()], weight: w }))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<ChildPair, f64>, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        let mut map = BTreeMap::new();
        for Entry { pair: [a, b], weight } in entries {
            let key = ChildPair::new(a, b).map_err(serde::de::Error::custom)?;
            if map.insert(key.clone(), weight).is_some() {
                return Err(serde::de::Error::custom(format!("duplicate pair {key}")));
            }
        }
        Ok(map)
    }
}

/// Coefficients of a 2-additive Choquet integral
/// `F(a) = sum_l w_l a_l + sum_{l<m} (wmin_lm min(a_l, a_m) + wmax_lm max(a_l, a_m))`.
///
/// The children of the node are exactly the keys of `singleton_weights`
/// (zero weights are listed explicitly).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ChoquetParams {
    pub singleton_weights: BTreeMap<NodeId, f64>,
    #[serde(with = "pair_map", default)]
    pub min_weights: BTreeMap<ChildPair, f64>,
    #[serde(with = "pair_map", default)]
    pub max_weights: BTreeMap<ChildPair, f64>,
}

/// Shapley importance per child and pairwise interaction `wmin - wmax`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interpretation {
    pub importance: BTreeMap<NodeId, f64>,
    #[serde(with = "pair_map")]
    pub interaction: BTreeMap<ChildPair, f64>,
}

impl ChoquetParams {
    pub fn weighted_sum<I, S>(weights: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<NodeId>,
    {
        let p = Self {
            singleton_weights: weights.into_iter().map(|(k, w)| (k.into(), w)).collect(),
            ..Default::default()
        };
        p.validate()?;
        Ok(p)
    }

    /// Adds a min (complementarity) term. Validation is deferred to
    /// [`ChoquetParams::validate`].
    pub fn with_min(mut self, a: &str, b: &str, w: f64) -> Result<Self> {
        self.min_weights.insert(ChildPair::new(a, b)?, w);
        Ok(self)
    }

    /// Adds a max (redundancy) term.
    pub fn with_max(mut self, a: &str, b: &str, w: f64) -> Result<Self> {
        self.max_weights.insert(ChildPair::new(a, b)?, w);
        Ok(self)
    }

    pub fn children(&self) -> impl Iterator<Item = &NodeId> {
        self.singleton_weights.keys()
    }

    pub fn arity(&self) -> usize {
        self.singleton_weights.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.singleton_weights.values().sum::<f64>()
            + self.min_weights.values().sum::<f64>()
            + self.max_weights.values().sum::<f64>()
    }

    fn invalid(reason: impl Into<String>) -> McdaError {
        McdaError::InvalidParams { node: None, reason: reason.into() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.singleton_weights.is_empty() {
            return Err(Self::invalid("no children"));
        }
        for (id, &w) in &self.singleton_weights {
            if !w.is_finite() || w < 0.0 {
                return Err(Self::invalid(format!("weight of `{id}` must be finite and non-negative, got {w}")));
            }
        }
        for (kind, map) in [("min", &self.min_weights), ("max", &self.max_weights)] {
            for (pair, &w) in map {
                if !w.is_finite() || w < 0.0 {
                    return Err(Self::invalid(format!("{kind} weight of {pair} must be finite and non-negative, got {w}")));
                }
                for id in [pair.first(), pair.second()] {
                    if !self.singleton_weights.contains_key(id) {
                        return Err(Self::invalid(format!("{kind} pair {pair} references unknown child `{id}`")));
                    }
                }
            }
        }
        let total = self.total_weight();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Self::invalid(format!("coefficients sum to {total}, expected 1")));
        }
        Ok(())
    }

    /// Evaluates the integral. `inputs` must cover exactly this node's
    /// children with finite non-negative scores.
    pub fn evaluate(&self, inputs: &BTreeMap<NodeId, f64>) -> Result<f64> {
        for (id, &v) in inputs {
            if !self.singleton_weights.contains_key(id) {
                return Err(McdaError::UnexpectedInput(id.clone()));
            }
            if !v.is_finite() || v < 0.0 {
                return Err(McdaError::InvalidInput { child: id.clone(), value: v });
            }
        }
        if let Some(missing) = self.children().find(|c| !inputs.contains_key(*c)) {
            return Err(McdaError::MissingInput(missing.clone()));
        }
        Ok(self.aggregate(|id| inputs[id]))
    }

    /// Unchecked evaluation with scores supplied by `score`.
    pub(crate) fn aggregate<F: Fn(&str) -> f64>(&self, score: F) -> f64 {
        let mut total = 0.0;
        for (id, &w) in &self.singleton_weights {
            if w != 0.0 {
                total += w * score(id);
            }
        }
        for (pair, &w) in &self.min_weights {
            if w != 0.0 {
                total += w * score(pair.first()).min(score(pair.second()));
            }
        }
        for (pair, &w) in &self.max_weights {
            if w != 0.0 {
                total += w * score(pair.first()).max(score(pair.second()));
            }
        }
        total
    }

    pub fn min_weight(&self, a: &str, b: &str) -> f64 {
        ChildPair::new(a, b).ok().and_then(|p| self.min_weights.get(&p).copied()).unwrap_or(0.0)
    }

    pub fn max_weight(&self, a: &str, b: &str) -> f64 {
        ChildPair::new(a, b).ok().and_then(|p| self.max_weights.get(&p).copied()).unwrap_or(0.0)
    }

    /// Shapley importance `w_l + sum_m (wmin_lm + wmax_lm) / 2` and
    /// interaction `wmin_lm - wmax_lm` for every pair of children. Negative
    /// interaction means redundancy, positive means complementarity.
    pub fn importance_and_interaction(&self) -> Interpretation {
        let mut importance: BTreeMap<NodeId, f64> = self.singleton_weights.clone();
        for (pair, &w) in self.min_weights.iter().chain(self.max_weights.iter()) {
            for id in [pair.first(), pair.second()] {
                *importance.get_mut(id).expect("validated pair") += w / 2.0;
            }
        }
        let children: Vec<&NodeId> = self.children().collect();
        let mut interaction = BTreeMap::new();
        for (i, a) in children.iter().enumerate() {
            for b in &children[i + 1..] {
                let pair = ChildPair::new(a.as_str(), b.as_str()).expect("distinct keys");
                let wmin = self.min_weights.get(&pair).copied().unwrap_or(0.0);
                let wmax = self.max_weights.get(&pair).copied().unwrap_or(0.0);
                interaction.insert(pair, wmin - wmax);
            }
        }
        Interpretation { importance, interaction }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn inputs(pairs: &[(&str, f64)]) -> BTreeMap<NodeId, f64> {
        pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
    }

    fn redundant() -> ChoquetParams {
        let p = ChoquetParams {
            singleton_weights: inputs(&[("a", 0.3), ("b", 0.2)]),
            ..Default::default()
        }
        .with_max("a", "b", 0.5)
        .unwrap();
        p.validate().unwrap();
        p
    }

    #[test]
    fn idempotent_on_equal_inputs() {
        let p = ChoquetParams::weighted_sum([("a", 0.5), ("b", 0.5)]).unwrap();
        assert_abs_diff_eq!(p.evaluate(&inputs(&[("a", 0.4), ("b", 0.4)])).unwrap(), 0.4, epsilon = 1e-15);
    }

    #[test]
    fn pure_min() {
        let p = ChoquetParams { singleton_weights: inputs(&[("a", 0.0), ("b", 0.0)]), ..Default::default() }
            .with_min("a", "b", 1.0)
            .unwrap();
        p.validate().unwrap();
        assert_eq!(p.evaluate(&inputs(&[("a", 0.3), ("b", 0.9)])).unwrap(), 0.3);
    }

    #[test]
    fn singleton_plus_max_term() {
        // 0.3*0.4 + 0.2*(2/3) + 0.5*(2/3)
        let v = redundant().evaluate(&inputs(&[("a", 0.4), ("b", 2.0 / 3.0)])).unwrap();
        assert_abs_diff_eq!(v, 0.12 + 0.7 * 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v, 0.5867, epsilon = 1e-4);
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = redundant();
        assert_eq!(p.evaluate(&inputs(&[("a", 0.4)])), Err(McdaError::MissingInput("b".into())));
        assert_eq!(
            p.evaluate(&inputs(&[("a", 0.4), ("b", 0.1), ("c", 0.2)])),
            Err(McdaError::UnexpectedInput("c".into()))
        );
        assert!(matches!(p.evaluate(&inputs(&[("a", -0.1), ("b", 0.1)])), Err(McdaError::InvalidInput { .. })));
    }

    #[test]
    fn refuses_to_renormalise() {
        let err = ChoquetParams::weighted_sum([("a", 0.5), ("b", 0.6)]).unwrap_err();
        assert!(matches!(err, McdaError::InvalidParams { .. }));
        assert!(ChoquetParams::weighted_sum([("a", 1.0 + 5e-10)]).is_ok());
        assert!(ChoquetParams::weighted_sum([("a", -0.5), ("b", 1.5)]).is_err());
        let dangling = ChoquetParams { singleton_weights: inputs(&[("a", 0.5), ("b", 0.25)]), ..Default::default() }
            .with_max("a", "z", 0.25)
            .unwrap();
        assert!(dangling.validate().is_err());
        assert!(ChildPair::new("a", "a").is_err());
    }

    #[test]
    fn importance_and_interaction_closed_form() {
        let i = redundant().importance_and_interaction();
        assert_abs_diff_eq!(i.importance["a"], 0.55, epsilon = 1e-15);
        assert_abs_diff_eq!(i.importance["b"], 0.45, epsilon = 1e-15);
        assert_abs_diff_eq!(i.interaction[&ChildPair::new("a", "b").unwrap()], -0.5, epsilon = 1e-15);

        let ws = ChoquetParams::weighted_sum([("a", 0.2), ("b", 0.3), ("c", 0.5)]).unwrap();
        let i = ws.importance_and_interaction();
        assert_eq!(i.importance, ws.singleton_weights);
        assert_eq!(i.interaction.len(), 3);
        assert!(i.interaction.values().all(|&v| v == 0.0));
    }

    #[test]
    fn pair_maps_serialise_as_lists() {
        let p = redundant();
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains(r#""max_weights":[{"pair":["a","b"],"weight":0.5}]"#), "{json}");
        let back: ChoquetParams = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        let dup = r#"{"singleton_weights":{"a":0.5,"b":0.5},"max_weights":[{"pair":["a","b"],"weight":0.0},{"pair":["b","a"],"weight":0.0}]}"#;
        assert!(serde_json::from_str::<ChoquetParams>(dup).is_err());
    }
}

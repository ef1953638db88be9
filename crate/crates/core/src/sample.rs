//! Weighted samples of ground-space elements.

use std::collections::{HashMap, HashSet};

use num_traits::{Signed, Zero};

use crate::closures::Element;
use crate::error::{input, Result};
use crate::rational::{int, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observation {
    pub id: String,
    pub element: Element,
    pub weight: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sample {
    obs: Vec<Observation>,
}

impl Sample {
    /// Ids must be unique and weights nonnegative.
    pub fn new(obs: Vec<Observation>) -> Result<Self> {
        let mut seen = HashSet::new();
        for o in &obs {
            if !seen.insert(o.id.as_str()) {
                return input(format!("duplicate observation id {:?}", o.id));
            }
            if o.weight.is_negative() {
                return input(format!("observation {:?} has negative weight", o.id));
            }
        }
        Ok(Sample { obs })
    }

    /// Unit weights and ids `o1, o2, ...`.
    pub fn unit(elements: impl IntoIterator<Item = Element>) -> Self {
        Self::weighted(elements.into_iter().map(|e| (e, int(1)))).expect("unit weights are valid")
    }

    pub fn weighted(elements: impl IntoIterator<Item = (Element, Rational)>) -> Result<Self> {
        Self::new(
            elements
                .into_iter()
                .enumerate()
                .map(|(i, (element, weight))| Observation {
                    id: format!("o{}", i + 1),
                    element,
                    weight,
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.obs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.obs.is_empty()
    }

    pub fn observations(&self) -> &[Observation] {
        &self.obs
    }

    pub fn elements(&self) -> Vec<Element> {
        self.obs.iter().map(|o| o.element.clone()).collect()
    }

    pub fn total_weight(&self) -> Rational {
        self.obs.iter().map(|o| &o.weight).sum()
    }

    /// Distinct elements with their summed weights, in order of first appearance.
    pub fn objects(&self) -> Vec<(Element, Rational)> {
        let mut index: HashMap<&Element, usize> = HashMap::new();
        let mut out: Vec<(Element, Rational)> = Vec::new();
        for o in &self.obs {
            match index.get(&o.element) {
                Some(&i) => out[i].1 += &o.weight,
                None => {
                    index.insert(&o.element, out.len());
                    out.push((o.element.clone(), o.weight.clone()));
                }
            }
        }
        out
    }

    /// Like [`Sample::objects`] but without zero-weight objects.
    pub fn positive_objects(&self) -> Vec<(Element, Rational)> {
        self.objects().into_iter().filter(|(_, w)| !w.is_zero()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn objects_merge_repeated_elements() {
        let s = Sample::unit([Element::Object(0), Element::Object(1), Element::Object(0)]);
        assert_eq!(s.objects(), vec![(Element::Object(0), int(2)), (Element::Object(1), int(1))]);
        assert_eq!(s.total_weight(), int(3));
    }

    #[test]
    fn rejects_bad_observations() {
        let o = |id: &str, w| Observation {
            id: id.into(),
            element: Element::Object(0),
            weight: int(w),
        };
        assert!(Sample::new(vec![o("a", 1), o("a", 1)]).is_err());
        assert!(Sample::new(vec![o("a", -1)]).is_err());
    }
}

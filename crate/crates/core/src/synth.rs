//! Seeded synthetic survey tables with planted attribute–class dependence.
//!
//! Every attribute takes values `1..=n_categories` (Likert-style). The class
//! is binary, `male` (code 0) or `female` (code 1), with `class_ratio` the
//! probability of `female`. Uninformative attributes are uniform and
//! independent of the class. An informative attribute with strength `s`
//! draws, with probability `s`, from its class-conditional distribution and
//! otherwise uniformly.
//!
//! The class-conditional distributions partition the categories: a seeded
//! permutation of the categories is dealt round-robin to the classes and
//! each class is uniform over its share. The supports are therefore
//! disjoint, and with `s = 1` the attribute determines the class.

use crate::data::{DataTable, NominalVariable, Schema, MISSING_LABEL};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, SplitMix64};

/// Female share of the reference survey: 113,129 of 196,203 respondents.
pub const SURVEY_CLASS_RATIO: f64 = 113_129.0 / 196_203.0;

pub const SURVEY_ROWS: usize = 196_203;

pub const CLASS_LABELS: [&str; 2] = ["male", "female"];

pub const CLASS_NAME: &str = "gender";

/// Column names used when a table has exactly 21 attributes, in survey order.
pub const SURVEY_ATTRIBUTES: [&str; 21] = [
    "personal_health",
    "marriage",
    "personal_education",
    "housing",
    "district",
    "job",
    "job_income",
    "household_income",
    "social_life",
    "self_care",
    "commute_time",
    "relative",
    "friend",
    "neighbor",
    "workplace_relations",
    "general_health_services",
    "public_order",
    "judicial",
    "general_education",
    "sii_services",
    "transportation",
];

/// Stream offset for the per-attribute category permutations.
const PERMUTATION_STREAM: u64 = 1 << 32;

#[derive(Clone, Debug, PartialEq)]
pub struct SynthSpec {
    pub n_rows: usize,
    pub n_attributes: usize,
    pub n_categories: usize,
    /// `(attribute index, strength)`; indices are 0-based column indices.
    pub informative: Vec<(usize, f64)>,
    /// Probability of class code 1.
    pub class_ratio: f64,
    pub missing_rate: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            n_rows: 1000,
            n_attributes: 21,
            n_categories: 5,
            informative: Vec::new(),
            class_ratio: SURVEY_CLASS_RATIO,
            missing_rate: 0.0,
            seed: 42,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_rows == 0 {
            return Err(Error::arg("rows must be >= 1"));
        }
        if self.n_attributes == 0 {
            return Err(Error::arg("attributes must be >= 1"));
        }
        if !(2..=254).contains(&self.n_categories) {
            return Err(Error::arg("categories must be in 2..=254"));
        }
        let mut seen = vec![false; self.n_attributes];
        for &(a, s) in &self.informative {
            if a >= self.n_attributes {
                return Err(Error::arg(format!("informative attribute {a} out of range")));
            }
            if std::mem::replace(&mut seen[a], true) {
                return Err(Error::arg(format!("informative attribute {a} listed twice")));
            }
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::arg(format!("strength {s} outside [0, 1]")));
            }
        }
        if !(self.class_ratio > 0.0 && self.class_ratio < 1.0) {
            return Err(Error::arg("class ratio must be in (0, 1)"));
        }
        if !(0.0..1.0).contains(&self.missing_rate) {
            return Err(Error::arg("missing rate must be in [0, 1)"));
        }
        Ok(())
    }

    pub fn attribute_names(&self) -> Vec<String> {
        if self.n_attributes == SURVEY_ATTRIBUTES.len() {
            SURVEY_ATTRIBUTES.iter().map(|s| s.to_string()).collect()
        } else {
            (1..=self.n_attributes).map(|i| format!("attr_{i}")).collect()
        }
    }

    fn strength(&self, attribute: usize) -> f64 {
        self.informative
            .iter()
            .find(|&&(a, _)| a == attribute)
            .map_or(0.0, |&(_, s)| s)
    }
}

/// Categories (0-based codes) that `class` favours on `attribute`.
pub fn class_support(spec: &SynthSpec, attribute: usize, class: usize) -> Vec<u8> {
    let mut perm: Vec<u8> = (0..spec.n_categories as u8).collect();
    SplitMix64::new(derive_seed(spec.seed, PERMUTATION_STREAM + attribute as u64))
        .shuffle(&mut perm);
    perm.into_iter()
        .enumerate()
        .filter(|(i, _)| i % CLASS_LABELS.len() == class)
        .map(|(_, c)| c)
        .collect()
}

/// P(value | class) for `attribute`, including the uniform mixture component.
pub fn class_conditional(spec: &SynthSpec, attribute: usize, class: usize) -> Vec<f64> {
    let s = spec.strength(attribute);
    let k = spec.n_categories as f64;
    let support = class_support(spec, attribute, class);
    let mut p = vec![(1.0 - s) / k; spec.n_categories];
    for &c in &support {
        p[c as usize] += s / support.len() as f64;
    }
    p
}

/// Draws a table from `spec`. The last column is the class `gender`.
pub fn generate(spec: &SynthSpec) -> Result<DataTable> {
    spec.validate()?;
    let n_attr = spec.n_attributes;
    let supports: Vec<Vec<Vec<u8>>> = (0..n_attr)
        .map(|a| {
            (0..CLASS_LABELS.len())
                .map(|c| class_support(spec, a, c))
                .collect()
        })
        .collect();
    let strengths: Vec<f64> = (0..n_attr).map(|a| spec.strength(a)).collect();
    let has_missing = spec.missing_rate > 0.0;
    let na_code = spec.n_categories as u8;

    let mut rng = SplitMix64::new(spec.seed);
    let mut columns = vec![Vec::with_capacity(spec.n_rows); n_attr + 1];
    for _ in 0..spec.n_rows {
        let class = usize::from(rng.next_f64() < spec.class_ratio);
        columns[n_attr].push(class as u8);
        for a in 0..n_attr {
            let s = strengths[a];
            let mut code = if s > 0.0 && rng.next_f64() < s {
                let support = &supports[a][class];
                support[rng.below(support.len())]
            } else {
                rng.below(spec.n_categories) as u8
            };
            if has_missing && rng.next_f64() < spec.missing_rate {
                code = na_code;
            }
            columns[a].push(code);
        }
    }

    let mut categories: Vec<String> = (1..=spec.n_categories).map(|i| i.to_string()).collect();
    if has_missing {
        categories.push(MISSING_LABEL.to_string());
    }
    let mut variables = spec
        .attribute_names()
        .into_iter()
        .map(|name| {
            if has_missing {
                NominalVariable::with_missing_category(name, categories.clone(), na_code)
            } else {
                NominalVariable::new(name, categories.clone())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    variables.push(NominalVariable::new(
        CLASS_NAME,
        CLASS_LABELS.iter().map(|s| s.to_string()).collect(),
    )?);
    DataTable::new(Schema::new(variables, n_attr)?, columns)
}

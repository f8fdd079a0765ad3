//! Unified handle over conventional and semi-analytical rules, plus the
//! name-based registry used by studies, benchmarks and the CLI.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::hex8::Hex8;
use crate::poly::Polynomial3;
use crate::quadrature::{mass_conventional, MassMatrix, QuadratureRule};
use crate::semianalytic::{mass_semianalytic, SemiAnalyticRule};

/// Any mass-matrix integration rule.
#[derive(Debug, Clone)]
pub enum Rule {
    Conventional(QuadratureRule),
    SemiAnalytic(SemiAnalyticRule),
}

/// All built-in rule tokens, conventional then semi-analytical.
pub const BUILTIN_RULES: [&str; 9] = [
    "g1", "g4", "g6", "tensor2", "tensor3", "tensor4", "cmd", "lmd", "qmd20",
];

impl Rule {
    pub fn builtin(name: &str) -> Result<Self> {
        if QuadratureRule::builtin_names().contains(&name) {
            return Ok(Rule::Conventional(QuadratureRule::builtin(name)?));
        }
        if SemiAnalyticRule::builtin_names().contains(&name) {
            return Ok(Rule::SemiAnalytic(SemiAnalyticRule::builtin(name)?));
        }
        Err(Error::UnknownRule {
            name: name.to_string(),
            valid: BUILTIN_RULES.join(", "),
        })
    }

    pub fn name(&self) -> &str {
        match self {
            Rule::Conventional(r) => r.name(),
            Rule::SemiAnalytic(r) => r.name(),
        }
    }

    pub fn n_points(&self) -> usize {
        match self {
            Rule::Conventional(r) => r.n_points(),
            Rule::SemiAnalytic(r) => r.n_points(),
        }
    }

    /// Stored real numbers per the memory model: w_p plus tabulated shape
    /// values for conventional rules, the symmetric tensor slices for
    /// semi-analytical ones.
    pub fn stored_weight_count(&self) -> usize {
        match self {
            Rule::Conventional(r) => r.stored_weight_count(),
            Rule::SemiAnalytic(r) => r.stored_weight_count(),
        }
    }

    pub fn assemble(&self, hex: &Hex8, rho: &Polynomial3) -> MassMatrix {
        match self {
            Rule::Conventional(r) => mass_conventional(hex, rho, r),
            Rule::SemiAnalytic(r) => mass_semianalytic(hex, rho, r),
        }
    }
}

/// Registry resolving rule tokens; user-supplied JSON quadrature rules can be
/// added and then referenced by name exactly like built-ins.
#[derive(Debug, Default, Clone)]
pub struct RuleSet {
    extra: BTreeMap<String, Rule>,
}

impl RuleSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a rule from its JSON form, returning its name.
    pub fn add_quadrature_json(&mut self, text: &str) -> Result<String> {
        let rule = QuadratureRule::from_json(text)?;
        let name = rule.name().to_string();
        self.extra.insert(name.clone(), Rule::Conventional(rule));
        Ok(name)
    }

    pub fn resolve(&self, name: &str) -> Result<Rule> {
        if let Some(rule) = self.extra.get(name) {
            return Ok(rule.clone());
        }
        Rule::builtin(name).map_err(|_| Error::UnknownRule {
            name: name.to_string(),
            valid: {
                let mut names: Vec<&str> = BUILTIN_RULES.to_vec();
                names.extend(self.extra.keys().map(String::as_str));
                names.join(", ")
            },
        })
    }

    /// Resolves a comma-separated token list in order.
    pub fn resolve_list(&self, tokens: &str) -> Result<Vec<Rule>> {
        tokens
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| self.resolve(t))
            .collect()
    }
}

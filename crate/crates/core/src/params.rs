//! Flat key-value parameter files for the bivariate standardized family,
//! plus the built-in demonstration sets.
//!
//! Format: one `key = value` pair per line, `#` comments, and optional
//! `[name]` section headers for files carrying several sets. Recognized keys:
//! rho, a1, a2, b1, b2, c1, c2, c3, g0, generator, dof, standardized,
//! h_kind, alpha.

use std::collections::HashSet;
use std::path::Path;

use crate::elliptical::{EllipticalBaseline, GeneratorKind};
use crate::error::{Error, Result};
use crate::modulation::{HFunction, OddMap, SecDensity, SymmetricCdf};

/// One parameter set of the bivariate standardized family (mu = 0, unit
/// marginal variances, correlation rho, scalar Y block).
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSet {
    pub id: String,
    pub rho: f64,
    pub generator: GeneratorKind,
    pub g0: SymmetricCdf,
    pub h: HFunction,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub standardized: bool,
}

impl ParamSet {
    /// Builds the evaluable density; all construction invariants are checked
    /// here (correlation, denominator positivity, c2 sign).
    pub fn build(&self) -> Result<SecDensity> {
        let baseline = EllipticalBaseline::standard_bivariate(self.rho, self.generator)?;
        let odd = OddMap::RationalOdd {
            c1: self.c1,
            c2: self.c2,
            c3: self.c3,
        };
        Ok(
            SecDensity::new(baseline, self.g0, self.h.clone(), odd, self.standardized)?
                .with_label(self.id.clone()),
        )
    }

    /// Serializes to the flat key-value format (round-trips through
    /// [`parse_sets`]).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("[{}]\n", self.id));
        out.push_str(&format!("rho = {}\n", self.rho));
        match self.generator {
            GeneratorKind::Normal => out.push_str("generator = normal\n"),
            GeneratorKind::StudentT { dof } => {
                out.push_str("generator = student-t\n");
                out.push_str(&format!("dof = {dof}\n"));
            }
        }
        out.push_str(&format!("g0 = {}\n", self.g0.name()));
        out.push_str(&format!("h_kind = {}\n", self.h.name()));
        match self.h {
            HFunction::Constant(a) | HFunction::Linear(a) | HFunction::AlphaAbs(a) => {
                out.push_str(&format!("alpha = {a}\n"));
            }
            HFunction::CosineInverted { .. } => {}
            HFunction::Rational { a1, a2, b1, b2 } => {
                out.push_str(&format!("a1 = {a1}\na2 = {a2}\nb1 = {b1}\nb2 = {b2}\n"));
            }
        }
        out.push_str(&format!(
            "c1 = {}\nc2 = {}\nc3 = {}\n",
            self.c1, self.c2, self.c3
        ));
        out.push_str(&format!("standardized = {}\n", self.standardized));
        out
    }
}

#[derive(Default, Clone)]
struct RawSet {
    id: String,
    keys: Vec<(String, String)>,
}

/// Parses one or more parameter sets from the flat key-value text.
pub fn parse_sets(text: &str, default_id: &str) -> Result<Vec<ParamSet>> {
    let mut raw_sets: Vec<RawSet> = Vec::new();
    let mut current = RawSet {
        id: default_id.to_string(),
        keys: Vec::new(),
    };
    let mut saw_header = false;

    for (lineno, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            if !line.ends_with(']') || line.len() < 3 {
                return Err(Error::Parse(format!(
                    "line {}: malformed section header",
                    lineno + 1
                )));
            }
            if saw_header || !current.keys.is_empty() {
                raw_sets.push(std::mem::take(&mut current));
            }
            current.id = line[1..line.len() - 1].trim().to_string();
            saw_header = true;
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Parse(format!(
                "line {}: expected `key = value`, got `{line}`",
                lineno + 1
            ))
        })?;
        current
            .keys
            .push((key.trim().to_lowercase(), value.trim().to_string()));
    }
    if saw_header || !current.keys.is_empty() {
        raw_sets.push(current);
    }
    if raw_sets.is_empty() {
        return Err(Error::Parse("no parameter sets found".into()));
    }
    raw_sets.into_iter().map(resolve_raw).collect()
}

fn resolve_raw(raw: RawSet) -> Result<ParamSet> {
    const KNOWN: [&str; 14] = [
        "rho",
        "a1",
        "a2",
        "b1",
        "b2",
        "c1",
        "c2",
        "c3",
        "g0",
        "generator",
        "dof",
        "standardized",
        "h_kind",
        "alpha",
    ];
    let mut seen = HashSet::new();
    for (k, _) in &raw.keys {
        if !KNOWN.contains(&k.as_str()) {
            return Err(Error::Parse(format!(
                "unknown key `{k}` in set `{}`",
                raw.id
            )));
        }
        if !seen.insert(k.clone()) {
            return Err(Error::Parse(format!(
                "duplicate key `{k}` in set `{}`",
                raw.id
            )));
        }
    }
    let get = |key: &str| {
        raw.keys
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    };
    let get_f64 = |key: &str| -> Result<Option<f64>> {
        get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("key `{key}`: not a number: `{v}`")))
            })
            .transpose()
    };

    let rho = get_f64("rho")?
        .ok_or_else(|| Error::Parse(format!("set `{}`: missing required key `rho`", raw.id)))?;

    let generator = match get("generator").unwrap_or("normal") {
        "normal" => GeneratorKind::Normal,
        "student-t" | "student_t" | "t" => {
            let dof = get_f64("dof")?.ok_or_else(|| {
                Error::Parse("generator = student-t requires the `dof` key".into())
            })?;
            GeneratorKind::StudentT { dof }
        }
        other => return Err(Error::Parse(format!("unknown generator `{other}`"))),
    };

    let g0 = match get("g0").unwrap_or("normal") {
        "normal" => SymmetricCdf::StandardNormal,
        "cauchy" => SymmetricCdf::StandardCauchy,
        "logistic" => SymmetricCdf::Logistic,
        other => return Err(Error::Parse(format!("unknown g0 `{other}`"))),
    };

    let alpha = get_f64("alpha")?.unwrap_or(1.0);
    let h = match get("h_kind").unwrap_or("rational") {
        "constant" => HFunction::Constant(alpha),
        "linear" => HFunction::Linear(alpha),
        "alpha-abs" | "alpha_abs" => HFunction::AlphaAbs(alpha),
        "cosine-inverted" | "cosine_inverted" => HFunction::CosineInverted { rho },
        "rational" => HFunction::Rational {
            a1: get_f64("a1")?.unwrap_or(0.0),
            a2: get_f64("a2")?.unwrap_or(0.0),
            b1: get_f64("b1")?.unwrap_or(0.0),
            b2: get_f64("b2")?.unwrap_or(0.0),
        },
        other => return Err(Error::Parse(format!("unknown h_kind `{other}`"))),
    };

    let standardized = match get("standardized").unwrap_or("true") {
        "true" | "1" | "yes" => true,
        "false" | "0" | "no" => false,
        other => {
            return Err(Error::Parse(format!(
                "standardized must be boolean, got `{other}`"
            )))
        }
    };

    Ok(ParamSet {
        id: raw.id,
        rho,
        generator,
        g0,
        h,
        c1: get_f64("c1")?.unwrap_or(1.0),
        c2: get_f64("c2")?.unwrap_or(0.0),
        c3: get_f64("c3")?.unwrap_or(0.0),
        standardized,
    })
}

/// Reads parameter sets from a file; a headerless single set takes the file
/// stem as its id.
pub fn read_file(path: impl AsRef<Path>) -> Result<Vec<ParamSet>> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("params");
    parse_sets(&text, stem)
}

/// The six shipped demonstration sets. The published contour figures do not
/// state their coefficients, so these are plausible demonstrations, not
/// reproductions.
pub fn demo_sets() -> Vec<ParamSet> {
    vec![
        ParamSet {
            id: "demo_a".into(),
            rho: 0.5,
            generator: GeneratorKind::Normal,
            g0: SymmetricCdf::StandardCauchy,
            h: HFunction::Rational {
                a1: 1.0,
                a2: 0.5,
                b1: 0.0,
                b2: 1.0,
            },
            c1: 1.0,
            c2: 0.5,
            c3: 0.3,
            standardized: true,
        },
        ParamSet {
            id: "demo_b".into(),
            rho: -0.7,
            generator: GeneratorKind::Normal,
            g0: SymmetricCdf::StandardCauchy,
            h: HFunction::Rational {
                a1: -1.0,
                a2: 0.3,
                b1: 0.5,
                b2: 0.8,
            },
            c1: 2.0,
            c2: 1.0,
            c3: 0.5,
            standardized: true,
        },
        ParamSet {
            id: "demo_c".into(),
            rho: 0.3,
            generator: GeneratorKind::Normal,
            g0: SymmetricCdf::StandardNormal,
            h: HFunction::Rational {
                a1: 0.8,
                a2: 0.0,
                b1: 0.0,
                b2: 0.0,
            },
            c1: 1.0,
            c2: 0.0,
            c3: 0.8,
            standardized: true,
        },
        ParamSet {
            id: "demo_d".into(),
            rho: 0.5,
            generator: GeneratorKind::StudentT { dof: 5.0 },
            g0: SymmetricCdf::StandardNormal,
            h: HFunction::Rational {
                a1: 1.0,
                a2: 0.5,
                b1: 0.0,
                b2: 1.0,
            },
            c1: 1.0,
            c2: 0.5,
            c3: 0.3,
            standardized: true,
        },
        ParamSet {
            id: "demo_e".into(),
            rho: 0.0,
            generator: GeneratorKind::Normal,
            g0: SymmetricCdf::Logistic,
            h: HFunction::Rational {
                a1: 2.0,
                a2: 1.0,
                b1: 1.0,
                b2: 1.0,
            },
            c1: 1.0,
            c2: 2.0,
            c3: 1.0,
            standardized: true,
        },
        // the tractable constant-h configuration with known E[Y]
        ParamSet {
            id: "demo_f".into(),
            rho: 0.5,
            generator: GeneratorKind::Normal,
            g0: SymmetricCdf::StandardNormal,
            h: HFunction::Constant(1.0),
            c1: 1.0,
            c2: 0.0,
            c3: 0.0,
            standardized: false,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_single_set_with_defaults() {
        let text = "rho = 0.5\nh_kind = rational\na1 = 1\na2 = 0.5\nb2 = 1\nc1 = 1\n";
        let sets = parse_sets(text, "file_stem").unwrap();
        assert_eq!(sets.len(), 1);
        let s = &sets[0];
        assert_eq!(s.id, "file_stem");
        assert_eq!(s.rho, 0.5);
        assert_eq!(s.generator, GeneratorKind::Normal);
        assert_eq!(s.g0, SymmetricCdf::StandardNormal);
        assert!(s.standardized);
        assert!(s.build().is_ok());
    }

    #[test]
    fn parse_sections_and_comments() {
        let text = "\
# two sets in one file
[first]
rho = 0.2            # inline comment
g0 = cauchy
[second]
rho = -0.4
generator = student-t
dof = 4.5
h_kind = constant
alpha = 2.0
standardized = false
";
        let sets = parse_sets(text, "x").unwrap();
        assert_eq!(sets.len(), 2);
        assert_eq!(sets[0].id, "first");
        assert_eq!(sets[0].g0, SymmetricCdf::StandardCauchy);
        assert_eq!(sets[1].generator, GeneratorKind::StudentT { dof: 4.5 });
        assert_eq!(sets[1].h, HFunction::Constant(2.0));
        assert!(!sets[1].standardized);
    }

    #[test]
    fn parse_errors_name_the_problem() {
        assert!(matches!(parse_sets("", "x"), Err(Error::Parse(_))));
        assert!(parse_sets("nonsense = 1\nrho = 0.1", "x").is_err());
        assert!(parse_sets("rho = abc", "x").is_err());
        assert!(parse_sets("rho = 0.1\nrho = 0.2", "x").is_err());
        assert!(parse_sets("generator = student-t\nrho = 0.1", "x").is_err());
        assert!(parse_sets("rho = 0.1\ng0 = weird", "x").is_err());
    }

    #[test]
    fn invalid_coefficients_fail_at_build() {
        // parse succeeds, construction enforces the invariants
        let sets = parse_sets("rho = 0.2\nb1 = 5\nb2 = 1", "x").unwrap();
        assert!(sets[0].build().is_err());
        let sets = parse_sets("rho = 1.5", "x").unwrap();
        assert!(sets[0].build().is_err());
        let sets = parse_sets("rho = 0.2\nc2 = -1", "x").unwrap();
        assert!(sets[0].build().is_err());
    }

    #[test]
    fn round_trip_through_text() {
        for set in demo_sets() {
            let text = set.to_text();
            let parsed = parse_sets(&text, "ignored").unwrap();
            assert_eq!(parsed.len(), 1);
            assert_eq!(parsed[0], set);
        }
    }

    #[test]
    fn demo_sets_all_build() {
        let sets = demo_sets();
        assert_eq!(sets.len(), 6);
        for s in &sets {
            let d = s.build().unwrap_or_else(|e| panic!("{} failed: {e}", s.id));
            assert_eq!(d.label(), s.id);
        }
    }
}

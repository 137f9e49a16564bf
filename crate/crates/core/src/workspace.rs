//! JSON workspace files: named pc groups, subgroups, amalgams and elements,
//! plus the built-in targets.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::amalgam::Amalgam;
use crate::error::{Error, Result};
use crate::pc::{PcGroup, PcHom, PcSubgroup};
use crate::residual::{squared_form_check, trap_certificate, SquaredFormCheck, TrapCertificate};
use crate::word::{parse_presentation, parse_word, Presentation, Word};

pub const FORMAT_VERSION: u32 = 1;

/// A pc presentation, either in the text format or spelled out.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Text(String),
    Fields {
        gens: Vec<String>,
        #[serde(default)]
        rels: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        class: Option<usize>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubgroupSpec {
    pub group: String,
    pub gens: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DoubleSpec {
    pub base: String,
    pub subgroup: String,
    #[serde(default = "two")]
    pub copies: usize,
}

fn two() -> usize {
    2
}

/// Identity `(a^(x^i))^2 = a^2 * b^(eps*i)` to check for `i` in `range`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SquaredFormSpec {
    pub a: String,
    pub x: String,
    pub b: String,
    pub range: [i64; 2],
}

/// One of three shapes: `factors` + `core` + `embeddings` (images of the
/// core generators as words in each factor), `factors` + `identify`
/// (pairs of words, two factors), or `double`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AmalgamSpec {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub core: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub embeddings: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub identify: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub double: Option<DoubleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub squared_form: Option<SquaredFormSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElementSpec {
    #[serde(rename = "in")]
    pub target: String,
    pub word: String,
}

/// `element^w = [element^u, element^v]` in an amalgam.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrapSpec {
    pub amalgam: String,
    pub element: String,
    pub w: String,
    pub u: String,
    pub v: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorkspaceFile {
    pub format_version: u32,
    #[serde(default)]
    pub groups: BTreeMap<String, GroupSpec>,
    #[serde(default)]
    pub subgroups: BTreeMap<String, SubgroupSpec>,
    #[serde(default)]
    pub amalgams: BTreeMap<String, AmalgamSpec>,
    #[serde(default)]
    pub elements: BTreeMap<String, ElementSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub traps: BTreeMap<String, TrapSpec>,
}

#[derive(Debug, Clone)]
pub enum Resolved {
    Group(Arc<PcGroup>),
    Amalgam(Arc<Amalgam>),
}

#[derive(Debug, Clone)]
pub struct Workspace {
    pub source: String,
    pub file: WorkspaceFile,
    pub groups: BTreeMap<String, Arc<PcGroup>>,
    pub subgroups: BTreeMap<String, PcSubgroup>,
    pub amalgams: BTreeMap<String, Arc<Amalgam>>,
}

fn invalid(msg: String) -> Error {
    Error::Invalid(msg)
}

impl Workspace {
    /// A path to a JSON file, or `builtin:NAME`.
    pub fn load(source: &str) -> Result<Workspace> {
        if let Some(name) = source.strip_prefix("builtin:") {
            let text = builtin(name).ok_or_else(|| Error::Unresolved(format!("builtin:{name}")))?;
            let mut ws = Workspace::from_json(text)?;
            ws.source = source.to_string();
            return Ok(ws);
        }
        let text = std::fs::read_to_string(Path::new(source))
            .map_err(|e| invalid(format!("cannot read {source}: {e}")))?;
        let mut ws = Workspace::from_json(&text)?;
        ws.source = source.to_string();
        Ok(ws)
    }

    pub fn from_json(text: &str) -> Result<Workspace> {
        let file: WorkspaceFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            position: e.column(),
            message: format!("line {}: {e}", e.line()),
        })?;
        Workspace::from_file(file)
    }

    pub fn from_file(file: WorkspaceFile) -> Result<Workspace> {
        if file.format_version != FORMAT_VERSION {
            return Err(invalid(format!("unsupported format_version {}", file.format_version)));
        }
        let mut groups = BTreeMap::new();
        for (name, spec) in &file.groups {
            let p = match spec {
                GroupSpec::Text(t) => {
                    let mut p = parse_presentation(t)?;
                    p.name = name.clone();
                    p
                }
                GroupSpec::Fields { gens, rels, class } => {
                    let refs: Vec<&str> = rels.iter().map(String::as_str).collect();
                    Presentation::new(name, gens.clone(), &refs, *class)?
                }
            };
            groups.insert(name.clone(), Arc::new(PcGroup::from_presentation(&p)?));
        }
        let group = |n: &str| groups.get(n).cloned().ok_or_else(|| Error::Unresolved(n.to_string()));
        let mut subgroups = BTreeMap::new();
        for (name, spec) in &file.subgroups {
            let g = group(&spec.group)?;
            let refs: Vec<&str> = spec.gens.iter().map(String::as_str).collect();
            subgroups.insert(name.clone(), PcSubgroup::from_words(&g, &refs)?);
        }
        let mut amalgams = BTreeMap::new();
        for (name, spec) in &file.amalgams {
            let a = build_amalgam(name, spec, &groups, &subgroups)?;
            amalgams.insert(name.clone(), Arc::new(a));
        }
        let ws = Workspace { source: String::new(), file, groups, subgroups, amalgams };
        for (name, e) in &ws.file.elements {
            ws.parse_in(&e.target, &e.word).map_err(|err| invalid(format!("element {name}: {err}")))?;
        }
        for (name, t) in &ws.file.traps {
            if !ws.amalgams.contains_key(&t.amalgam) {
                return Err(Error::Unresolved(format!("{} (in trap {name})", t.amalgam)));
            }
        }
        Ok(ws)
    }

    pub fn resolve(&self, name: &str) -> Result<Resolved> {
        if let Some(a) = self.amalgams.get(name) {
            return Ok(Resolved::Amalgam(a.clone()));
        }
        if let Some(g) = self.groups.get(name) {
            return Ok(Resolved::Group(g.clone()));
        }
        Err(Error::Unresolved(name.to_string()))
    }

    pub fn amalgam(&self, name: &str) -> Result<Arc<Amalgam>> {
        match self.resolve(name)? {
            Resolved::Amalgam(a) => Ok(a),
            Resolved::Group(_) => Err(invalid(format!("`{name}` is a group, not an amalgam"))),
        }
    }

    /// The only amalgam of the workspace, when a target is omitted.
    pub fn default_amalgam(&self) -> Result<Arc<Amalgam>> {
        let mut it = self.amalgams.values();
        match (it.next(), it.next()) {
            (Some(a), None) => Ok(a.clone()),
            _ => Err(invalid(format!("{} has {} amalgams; name one", self.source, self.amalgams.len()))),
        }
    }

    /// A word over the target's generators; a named element of the same
    /// target is substituted.
    pub fn parse_in(&self, target: &str, text: &str) -> Result<Word> {
        if let Some(e) = self.file.elements.get(text) {
            if e.target == target {
                return self.parse_in(target, &e.word);
            }
        }
        match self.resolve(target)? {
            Resolved::Group(g) => parse_word(text, g.gens()),
            Resolved::Amalgam(a) => a.parse_word(text),
        }
    }

    pub fn trap(&self, amalgam: &str) -> Option<&TrapSpec> {
        self.file.traps.values().find(|t| t.amalgam == amalgam)
    }

    pub fn check_trap(&self, spec: &TrapSpec) -> Result<TrapCertificate> {
        let g = self.amalgam(&spec.amalgam)?;
        let p = |t: &str| g.parse_word(t);
        trap_certificate(&g, &p(&spec.element)?, &p(&spec.w)?, &p(&spec.u)?, &p(&spec.v)?)
    }

    pub fn squared_form(&self, amalgam: &str) -> Result<Option<SquaredFormCheck>> {
        let Some(spec) = self.file.amalgams.get(amalgam).and_then(|s| s.squared_form.as_ref()) else {
            return Ok(None);
        };
        let g = self.amalgam(amalgam)?;
        let [lo, hi] = spec.range;
        Ok(Some(squared_form_check(&g, &g.parse_word(&spec.a)?, &g.parse_word(&spec.x)?, &g.parse_word(&spec.b)?, lo..=hi)))
    }
}

fn build_amalgam(
    name: &str,
    spec: &AmalgamSpec,
    groups: &BTreeMap<String, Arc<PcGroup>>,
    subgroups: &BTreeMap<String, PcSubgroup>,
) -> Result<Amalgam> {
    let group = |n: &str| groups.get(n).cloned().ok_or_else(|| Error::Unresolved(format!("{n} (in amalgam {name})")));
    if let Some(d) = &spec.double {
        let base = group(&d.base)?;
        let sub = subgroups
            .get(&d.subgroup)
            .ok_or_else(|| Error::Unresolved(format!("{} (in amalgam {name})", d.subgroup)))?;
        if !Arc::ptr_eq(sub.group(), &base) {
            return Err(invalid(format!("amalgam {name}: `{}` is not a subgroup of {}", d.subgroup, d.base)));
        }
        return Amalgam::double(name, &base, sub, d.copies);
    }
    let factors = spec.factors.iter().map(|f| group(f)).collect::<Result<Vec<_>>>()?;
    if !spec.identify.is_empty() {
        if factors.len() != 2 {
            return Err(invalid(format!("amalgam {name}: `identify` needs exactly two factors")));
        }
        let pairs: Vec<(&str, &str)> = spec.identify.iter().map(|[x, y]| (x.as_str(), y.as_str())).collect();
        return Amalgam::from_identification_words(name, factors[0].clone(), factors[1].clone(), &pairs);
    }
    let core_name = spec.core.as_deref().ok_or_else(|| invalid(format!("amalgam {name}: no core given")))?;
    let core = group(core_name)?;
    if spec.embeddings.len() != factors.len() {
        return Err(invalid(format!("amalgam {name}: one embedding per factor is required")));
    }
    let embeddings = factors
        .iter()
        .zip(&spec.embeddings)
        .map(|(f, words)| {
            let refs: Vec<&str> = words.iter().map(String::as_str).collect();
            PcHom::from_words(&core, f, &refs)
        })
        .collect::<Result<Vec<_>>>()?;
    Amalgam::new(name, factors, core, embeddings)
}

pub const BUILTINS: [&str; 4] = ["heisenberg", "freenilp-3-2", "nil-neg", "example-8-1"];

pub fn builtin(name: &str) -> Option<&'static str> {
    Some(match name {
        "heisenberg" => HEISENBERG,
        "freenilp-3-2" => FREENILP_3_2,
        "nil-neg" => NIL_NEG,
        "example-8-1" => EXAMPLE_8_1,
        _ => return None,
    })
}

const HEISENBERG: &str = r#"{
  "format_version": 1,
  "groups": {
    "H": { "gens": ["a", "b", "c"], "rels": ["[b,a] = c"] }
  },
  "subgroups": {
    "Z": { "group": "H", "gens": ["c"] }
  },
  "amalgams": {
    "D": { "double": { "base": "H", "subgroup": "Z" } }
  }
}"#;

// free nilpotent of class 3 on x, y; F23 is free nilpotent of class 2 on three generators
const FREENILP_3_2: &str = r#"{
  "format_version": 1,
  "groups": {
    "F": { "gens": ["x", "y", "u", "v", "w"], "rels": ["[y,x] = u", "[u,x] = v", "[u,y] = w"], "class": 3 },
    "F23": { "gens": ["x1", "x2", "x3", "y21", "y31", "y32"],
             "rels": ["[x2,x1] = y21", "[x3,x1] = y31", "[x3,x2] = y32"] }
  }
}"#;

// class 2 and class 3 factors; a = b and a^x = [b, b^y]
const NIL_NEG: &str = r#"{
  "format_version": 1,
  "groups": {
    "A": { "gens": ["a", "x", "s"], "rels": ["[x,a] = s"] },
    "B": { "gens": ["b", "y", "t", "u", "v"], "rels": ["[y,b] = t", "[t,b] = u", "[t,y] = v"] }
  },
  "amalgams": {
    "G": { "factors": ["A", "B"], "identify": [["a", "b"], ["a^x", "[b, b^y]"]] }
  },
  "traps": {
    "T": { "amalgam": "G", "element": "a", "w": "x", "u": "1", "v": "y" }
  }
}"#;

const EXAMPLE_8_1: &str = r#"{
  "format_version": 1,
  "groups": {
    "A": { "gens": ["a", "b", "c"], "rels": [] },
    "B": { "gens": ["x", "y", "z"], "rels": ["[x,y] = z"] }
  },
  "amalgams": {
    "G": { "factors": ["A", "B"], "identify": [["a^2", "y"], ["b", "z"]],
           "squared_form": { "a": "a", "x": "x", "b": "b", "range": [-3, 3] } }
  }
}"#;

//! On-disk formats: JSON group, polyadic and presentation files, and the
//! line-oriented equation system file.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use polyadic::alggeo::EquationSystem;
use polyadic::cover::{GroupPresentation, PolyadicPresentation};
use polyadic::words::{FreeWord, Symbol};
use polyadic::{Automorphism, FiniteGroup, GroupError, NaryOperation, NaryTable, ParseError, PolyadicGroup};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{0}: file not found")]
    NotFound(PathBuf),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path}: invalid document at line {line}, column {column}: {message}")]
    Json { path: PathBuf, line: usize, column: usize, message: String },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{context}: unknown element '{name}'")]
    UnknownElement { context: String, name: String },
    #[error("{0}")]
    Invalid(String),
}

pub fn read_text(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => FormatError::NotFound(path.to_path_buf()),
        _ => FormatError::Io { path: path.to_path_buf(), message: e.to_string() },
    })
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, FormatError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| FormatError::Json {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn relative_to(base: &Path, target: &str) -> PathBuf {
    let t = Path::new(target);
    if t.is_absolute() {
        t.to_path_buf()
    } else {
        base.parent().unwrap_or(Path::new(".")).join(t)
    }
}

fn name_index(names: &[String], context: &str) -> Result<HashMap<String, usize>, FormatError> {
    let mut index = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.clone(), i).is_some() {
            return Err(FormatError::Invalid(format!("{context}: element '{n}' listed twice")));
        }
    }
    Ok(index)
}

fn lookup(index: &HashMap<String, usize>, name: &str, context: &str) -> Result<usize, FormatError> {
    index
        .get(name)
        .copied()
        .ok_or_else(|| FormatError::UnknownElement { context: context.to_string(), name: name.to_string() })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub elements: Vec<String>,
    pub table: Vec<Vec<String>>,
}

impl GroupFile {
    pub fn load(path: &Path) -> Result<Self, FormatError> {
        read_json(path)
    }

    pub fn from_group(g: &FiniteGroup, name: Option<String>) -> Self {
        Self {
            name,
            elements: g.names().to_vec(),
            table: g.rows().map(|row| row.iter().map(|&x| g.name(x).to_string()).collect()).collect(),
        }
    }

    /// Resolves names; structural problems are format errors, algebraic ones come from validation.
    pub fn to_group(&self) -> Result<Result<FiniteGroup, GroupError>, FormatError> {
        let context = self.name.clone().unwrap_or_else(|| "group table".to_string());
        let index = name_index(&self.elements, &context)?;
        let rows = self
            .table
            .iter()
            .map(|row| row.iter().map(|n| lookup(&index, n, &context)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FiniteGroup::validate(self.elements.clone(), rows))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Path(String),
    Inline(GroupFile),
}

/// `{group, theta, b, n}` or `{elements, n, table}` with a row-major table
/// (flat, or nested `n` levels deep).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolyadicFile {
    Derived { group: GroupRef, theta: BTreeMap<String, String>, b: String, n: usize },
    Table { elements: Vec<String>, n: usize, table: Value },
}

/// A polyadic file with names resolved but no axioms checked.
#[derive(Debug, Clone)]
pub enum RawPolyadic {
    Derived { group: FiniteGroup, theta: Vec<usize>, b: usize, n: usize },
    Table(NaryTable),
}

fn flatten(value: &Value, out: &mut Vec<String>) -> Result<(), FormatError> {
    match value {
        Value::Array(items) => items.iter().try_for_each(|v| flatten(v, out)),
        Value::String(s) => {
            out.push(s.clone());
            Ok(())
        }
        other => Err(FormatError::Invalid(format!("table entries must be element names, found {other}"))),
    }
}

impl PolyadicFile {
    pub fn load(path: &Path) -> Result<(Self, PathBuf), FormatError> {
        Ok((read_json(path)?, path.to_path_buf()))
    }

    /// Derived form with the group inlined.
    pub fn derived(p: &PolyadicGroup) -> Result<Self, polyadic::PolyadicError> {
        let d = p.derivation()?;
        let g = &d.group;
        Ok(PolyadicFile::Derived {
            group: GroupRef::Inline(GroupFile::from_group(g, None)),
            theta: g.elements().map(|x| (g.name(x).to_string(), g.name(d.theta.apply(x)).to_string())).collect(),
            b: g.name(d.b).to_string(),
            n: p.arity(),
        })
    }

    pub fn table(t: &NaryTable) -> Self {
        PolyadicFile::Table {
            elements: t.names().to_vec(),
            n: t.arity(),
            table: Value::Array(t.cells().iter().map(|&c| Value::String(t.names()[c].clone())).collect()),
        }
    }

    /// Resolves names. The inner result carries algebraic group failures.
    pub fn resolve(&self, origin: &Path) -> Result<Result<RawPolyadic, GroupError>, FormatError> {
        match self {
            PolyadicFile::Derived { group, theta, b, n } => {
                let gf = match group {
                    GroupRef::Path(p) => GroupFile::load(&relative_to(origin, p))?,
                    GroupRef::Inline(g) => g.clone(),
                };
                let g = match gf.to_group()? {
                    Ok(g) => g,
                    Err(e) => return Ok(Err(e)),
                };
                let index = name_index(g.names(), "polyadic group")?;
                let mut images = vec![usize::MAX; g.order()];
                for (from, to) in theta {
                    images[lookup(&index, from, "theta")?] = lookup(&index, to, "theta")?;
                }
                if let Some(x) = images.iter().position(|&v| v == usize::MAX) {
                    return Err(FormatError::Invalid(format!("theta has no image for '{}'", g.name(x))));
                }
                let b = lookup(&index, b, "b")?;
                Ok(Ok(RawPolyadic::Derived { group: g, theta: images, b, n: *n }))
            }
            PolyadicFile::Table { elements, n, table } => {
                let index = name_index(elements, "polyadic table")?;
                let mut names = Vec::new();
                flatten(table, &mut names)?;
                let cells = names.iter().map(|s| lookup(&index, s, "polyadic table")).collect::<Result<Vec<_>, _>>()?;
                NaryTable::new(elements.clone(), *n, cells)
                    .map(|t| Ok(RawPolyadic::Table(t)))
                    .map_err(|e| FormatError::Invalid(format!("polyadic table: {e}")))
            }
        }
    }
}

impl RawPolyadic {
    pub fn order(&self) -> usize {
        match self {
            RawPolyadic::Derived { group, .. } => group.order(),
            RawPolyadic::Table(t) => t.order(),
        }
    }

    pub fn names(&self) -> Vec<String> {
        match self {
            RawPolyadic::Derived { group, .. } => group.names().to_vec(),
            RawPolyadic::Table(t) => t.names().to_vec(),
        }
    }

    pub fn theta(&self) -> Option<Result<Automorphism, GroupError>> {
        match self {
            RawPolyadic::Derived { group, theta, .. } => Some(Automorphism::new(group, theta.clone())),
            RawPolyadic::Table(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationFile {
    pub generators: Vec<String>,
    pub relations: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

impl PresentationFile {
    pub fn load(path: &Path) -> Result<Self, FormatError> {
        read_json(path)
    }

    pub fn to_presentation(&self, arity: usize, path: &Path) -> Result<PolyadicPresentation, FormatError> {
        let gens: Vec<&str> = self.generators.iter().map(String::as_str).collect();
        let rels: Vec<String> = self.relations.iter().map(|[l, r]| format!("{l} = {r}")).collect();
        let rels: Vec<&str> = rels.iter().map(String::as_str).collect();
        PolyadicPresentation::parse(&gens, &rels, arity)
            .map_err(|e| FormatError::Parse { path: path.to_path_buf(), source: e })
    }
}

/// `{generators, relators}` with relators as free-group words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupPresentationFile {
    pub generators: Vec<String>,
    pub relators: Vec<String>,
}

impl GroupPresentationFile {
    pub fn load(path: &Path) -> Result<Self, FormatError> {
        read_json(path)
    }

    pub fn from_presentation(p: &GroupPresentation) -> Self {
        Self {
            generators: p.generators.iter().map(|s| s.as_str().to_string()).collect(),
            relators: p.relators.iter().map(|r| r.to_string()).collect(),
        }
    }

    pub fn to_presentation(&self, path: &Path) -> Result<GroupPresentation, FormatError> {
        let relators = self
            .relators
            .iter()
            .enumerate()
            .map(|(i, r)| {
                FreeWord::parse(r).map_err(|e| FormatError::Parse { path: path.to_path_buf(), source: e.offset_lines(i) })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GroupPresentation { generators: self.generators.iter().map(|g| Symbol::new(g)).collect(), relators })
    }
}

/// Header of a system file plus the raw equation lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemFile {
    pub polyadic: PathBuf,
    pub vars: usize,
    /// `(line number, text)` of each equation, 0-based.
    pub equations: Vec<(usize, String)>,
}

impl SystemFile {
    pub fn load(path: &Path) -> Result<Self, FormatError> {
        Self::parse(&read_text(path)?, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, FormatError> {
        let mut polyadic = None;
        let mut vars = None;
        let mut equations = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix("polyadic:") {
                polyadic = Some(relative_to(path, rest.trim()));
            } else if let Some(rest) = body.strip_prefix("vars:") {
                let m = rest.trim().parse::<usize>().map_err(|_| {
                    FormatError::Invalid(format!("{}:{}: vars must be a non-negative integer", path.display(), i + 1))
                })?;
                vars = Some(m);
            } else {
                equations.push((i, body.to_string()));
            }
        }
        let polyadic =
            polyadic.ok_or_else(|| FormatError::Invalid(format!("{}: missing 'polyadic:' header", path.display())))?;
        let vars = vars.ok_or_else(|| FormatError::Invalid(format!("{}: missing 'vars:' header", path.display())))?;
        Ok(Self { polyadic, vars, equations })
    }

    pub fn to_system(&self, p: &impl NaryOperation, path: &Path) -> Result<EquationSystem, FormatError> {
        let equations = self
            .equations
            .iter()
            .map(|(line, text)| {
                polyadic::terms::Equation::parse(text, p)
                    .map_err(|e| FormatError::Parse { path: path.to_path_buf(), source: e.offset_lines(*line) })
            })
            .collect::<Result<Vec<_>, _>>()?;
        EquationSystem::new(self.vars, equations).map_err(|e| FormatError::Invalid(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use polyadic::catalog;
    use polyadic::Limits;

    #[test]
    fn group_round_trip() {
        let g = catalog::symmetric3();
        let f = GroupFile::from_group(&g, Some("S3".into()));
        let text = serde_json::to_string(&f).unwrap();
        let back: GroupFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.to_group().unwrap().unwrap(), g);
    }

    #[test]
    fn polyadic_round_trips() {
        let p = catalog::z4_negation(2);
        let derived = PolyadicFile::derived(&p).unwrap();
        let text = serde_json::to_string(&derived).unwrap();
        let back: PolyadicFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, derived);
        assert!(matches!(back.resolve(Path::new("x.json")).unwrap().unwrap(), RawPolyadic::Derived { .. }));

        let table = PolyadicFile::table(&p.tabulate(&Limits::default()).unwrap());
        let text = serde_json::to_string(&table).unwrap();
        let back: PolyadicFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, table);
    }

    #[test]
    fn nested_tables_flatten() {
        let text = r#"{"elements":["a"],"n":3,"table":[[["a"]]]}"#;
        let f: PolyadicFile = serde_json::from_str(text).unwrap();
        assert!(matches!(f.resolve(Path::new("x")).unwrap().unwrap(), RawPolyadic::Table(_)));
    }

    #[test]
    fn unknown_names_are_reported() {
        let text = r#"{"elements":["a","b"],"table":[["a","b"],["b","q"]]}"#;
        let f: GroupFile = serde_json::from_str(text).unwrap();
        assert!(matches!(f.to_group(), Err(FormatError::UnknownElement { .. })));
    }

    #[test]
    fn system_headers() {
        let s = SystemFile::parse("# demo\npolyadic: p.json\nvars: 2\n\nf(x1,x2,x1) = x2 # trailing\n", Path::new("/d/s.sys"))
            .unwrap();
        assert_eq!(s.polyadic, PathBuf::from("/d/p.json"));
        assert_eq!(s.vars, 2);
        assert_eq!(s.equations, vec![(4, "f(x1,x2,x1) = x2".to_string())]);
        assert!(SystemFile::parse("vars: 1\n", Path::new("s")).is_err());
    }
}

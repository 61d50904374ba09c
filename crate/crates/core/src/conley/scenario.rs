//! Line-oriented scenario files describing two Morse decompositions on either
//! side of a parameter window, their connection matrices and the continuation
//! constraints on the transition matrix.
//!
//! ```text
//! [scenario]
//! name = example4.1
//! theta_before = 0.02
//! theta_after = 0.04
//!
//! [before.elements]          # label = description
//! 1 = (-2,0)
//! 2 = (-0.5,0)
//! [before.order]
//! 1 < 2
//! [before.index]             # sink | saddle | source | stable-cycle | r0 r1 r2
//! 1 = sink
//! 2 = saddle
//! {1,2} = 0 0 0              # optional: index of a larger interval
//! [before.connection]        # D(p,q)[@q] = iso | 0 | <number of orbits>
//! D(1,2) = iso
//!
//! [after.elements]
//! ...
//!
//! [constraints]              # T(row,col)[@q] = iso | 0 | unknown
//! T(1,1) = iso
//! ```
//!
//! `#` starts a comment. Element lines fix the basis order of each
//! decomposition.

use std::fmt;

use thiserror::Error;

use super::connection::mod2_connection_count;
use super::decomposition::{MorseDecomposition, MorseSet};
use super::graded_map::GradedMap;
use super::index::GradedIndex;
use super::poset::Poset;
use super::transition::{BlockConstraint, ConstraintEntry, ThetaWindow, TransitionConstraint};
use super::z2::Z2;
use crate::model::{conley_index_of, MorseSetKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ScenarioParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ScenarioParseError {
    ScenarioParseError { line, message: message.into() }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub window: Option<ThetaWindow>,
    pub before: MorseDecomposition,
    pub before_connection: GradedMap,
    pub after: MorseDecomposition,
    pub after_connection: GradedMap,
    pub constraint: TransitionConstraint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Before,
    After,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Before => "before",
            Side::After => "after",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Scenario,
    Elements(Side),
    Order(Side),
    Index(Side),
    Connection(Side),
    Constraints,
}

#[derive(Default)]
struct RawSide {
    elements: Vec<(String, String, usize)>,
    order: Vec<(String, String, usize)>,
    index: Vec<(String, GradedIndex, usize)>,
    /// Indices required of larger intervals, `{a,b} = ...`.
    intervals: Vec<(Vec<String>, GradedIndex, usize)>,
    connection: Vec<(String, String, Option<usize>, Z2, usize)>,
}

/// `name(a,b)` with an optional `@q` suffix.
fn parse_pair(text: &str, head: &[&str], line: usize) -> Result<(String, String, Option<usize>), ScenarioParseError> {
    let text = text.trim();
    let rest = head
        .iter()
        .find_map(|h| text.strip_prefix(h))
        .ok_or_else(|| err(line, format!("expected {}(row,col), found {text:?}", head[0])))?;
    let rest = rest.trim_start().strip_prefix('(').ok_or_else(|| err(line, "missing '('"))?;
    let close = rest.find(')').ok_or_else(|| err(line, "missing ')'"))?;
    let inner = &rest[..close];
    let (a, b) = inner.split_once(',').ok_or_else(|| err(line, "expected two labels separated by ','"))?;
    let tail = rest[close + 1..].trim();
    let degree = if tail.is_empty() {
        None
    } else {
        let q = tail
            .strip_prefix('@')
            .ok_or_else(|| err(line, format!("unexpected {tail:?} after the entry")))?;
        Some(q.trim().parse().map_err(|_| err(line, format!("bad degree {q:?}")))?)
    };
    let (a, b) = (a.trim(), b.trim());
    if a.is_empty() || b.is_empty() {
        return Err(err(line, "empty label"));
    }
    Ok((a.to_string(), b.to_string(), degree))
}

fn parse_index(text: &str, line: usize) -> Result<GradedIndex, ScenarioParseError> {
    let kind = match text {
        "sink" => Some(MorseSetKind::Sink),
        "saddle" => Some(MorseSetKind::Saddle),
        "source" => Some(MorseSetKind::Source),
        "stable-cycle" | "cycle" => Some(MorseSetKind::StableCycle),
        _ => None,
    };
    if let Some(kind) = kind {
        return Ok(conley_index_of(kind));
    }
    let ranks: Vec<usize> = text
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| err(line, format!("bad index {text:?}: expected a kind or three ranks"))))
        .collect::<Result<_, _>>()?;
    let ranks: [usize; 3] = ranks
        .try_into()
        .map_err(|_| err(line, format!("bad index {text:?}: expected three ranks r0 r1 r2")))?;
    Ok(GradedIndex::from_ranks(ranks))
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, ScenarioParseError> {
        let mut section: Option<Section> = None;
        let mut name = None;
        let mut theta_before = None;
        let mut theta_after = None;
        let mut sides = [RawSide::default(), RawSide::default()];
        let mut constraints = Vec::new();

        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(header) = content.strip_prefix('[') {
                let header = header.strip_suffix(']').ok_or_else(|| err(line, "unterminated section header"))?;
                section = Some(match header.trim() {
                    "scenario" => Section::Scenario,
                    "constraints" => Section::Constraints,
                    other => {
                        let (side, part) =
                            other.split_once('.').ok_or_else(|| err(line, format!("unknown section [{other}]")))?;
                        let side = match side {
                            "before" => Side::Before,
                            "after" => Side::After,
                            _ => return Err(err(line, format!("unknown decomposition {side:?}"))),
                        };
                        match part {
                            "elements" => Section::Elements(side),
                            "order" => Section::Order(side),
                            "index" => Section::Index(side),
                            "connection" => Section::Connection(side),
                            _ => return Err(err(line, format!("unknown section [{other}]"))),
                        }
                    }
                });
                continue;
            }
            let side_of = |s: Side| if s == Side::Before { 0 } else { 1 };
            match section.ok_or_else(|| err(line, "content before the first section header"))? {
                Section::Scenario => {
                    let (k, v) = content.split_once('=').ok_or_else(|| err(line, "expected key = value"))?;
                    let v = v.trim();
                    let num = || v.parse::<f64>().map_err(|_| err(line, format!("bad number {v:?}")));
                    match k.trim() {
                        "name" => name = Some(v.to_string()),
                        "theta_before" => theta_before = Some(num()?),
                        "theta_after" => theta_after = Some(num()?),
                        other => return Err(err(line, format!("unknown scenario key {other:?}"))),
                    }
                }
                Section::Elements(s) => {
                    let (label, desc) = match content.split_once('=') {
                        Some((l, d)) => (l.trim(), d.trim()),
                        None => (content, ""),
                    };
                    if label.contains(char::is_whitespace) || label.contains(['(', ')', ',']) {
                        return Err(err(line, format!("bad element label {label:?}")));
                    }
                    sides[side_of(s)].elements.push((label.to_string(), desc.to_string(), line));
                }
                Section::Order(s) => {
                    let (a, b) = content.split_once('<').ok_or_else(|| err(line, "expected `a < b`"))?;
                    sides[side_of(s)].order.push((a.trim().to_string(), b.trim().to_string(), line));
                }
                Section::Index(s) => {
                    let (label, idx) = content.split_once('=').ok_or_else(|| err(line, "expected label = index"))?;
                    let idx = parse_index(idx.trim(), line)?;
                    let label = label.trim();
                    if let Some(inner) = label.strip_prefix('{') {
                        let inner = inner.strip_suffix('}').ok_or_else(|| err(line, "missing '}'"))?;
                        let members = inner.split(',').map(|m| m.trim().to_string()).collect();
                        sides[side_of(s)].intervals.push((members, idx, line));
                    } else {
                        sides[side_of(s)].index.push((label.to_string(), idx, line));
                    }
                }
                Section::Connection(s) => {
                    let (entry, value) = match content.split_once('=') {
                        Some((e, v)) => (e, v.trim()),
                        None => (content, "iso"),
                    };
                    let (p, q, deg) = parse_pair(entry, &["D", "Δ"], line)?;
                    let value = match value {
                        "iso" | "1" => Z2::One,
                        "0" => Z2::Zero,
                        count => mod2_connection_count(count.parse().map_err(|_| {
                            err(line, format!("bad entry value {count:?}: use iso, 0 or an orbit count"))
                        })?),
                    };
                    sides[side_of(s)].connection.push((p, q, deg, value, line));
                }
                Section::Constraints => {
                    let (entry, value) =
                        content.split_once('=').ok_or_else(|| err(line, "expected T(row,col) = value"))?;
                    let (row, col, degree) = parse_pair(entry, &["T"], line)?;
                    let value = match value.trim() {
                        "iso" | "1" => BlockConstraint::Iso,
                        "0" => BlockConstraint::Zero,
                        "unknown" | "*" => BlockConstraint::Unknown,
                        other => return Err(err(line, format!("bad constraint value {other:?}"))),
                    };
                    constraints.push((ConstraintEntry { row, col, degree, value }, line));
                }
            }
        }

        let [before_raw, after_raw] = sides;
        let (before, before_connection) = build_side(Side::Before, before_raw)?;
        let (after, after_connection) = build_side(Side::After, after_raw)?;

        for (c, line) in &constraints {
            if before.position(&c.row).is_none() {
                return Err(err(*line, format!("constraint row {:?} is not a `before` element", c.row)));
            }
            if after.position(&c.col).is_none() {
                return Err(err(*line, format!("constraint column {:?} is not an `after` element", c.col)));
            }
        }

        let window = match (theta_before, theta_after) {
            (Some(before), Some(after)) => Some(ThetaWindow { before, after }),
            (None, None) => None,
            _ => return Err(err(0, "give both theta_before and theta_after, or neither")),
        };

        Ok(Scenario {
            name: name.unwrap_or_else(|| "unnamed".into()),
            window,
            before,
            before_connection,
            after,
            after_connection,
            constraint: TransitionConstraint { entries: constraints.into_iter().map(|(c, _)| c).collect() },
        })
    }

    pub fn preset(name: &str) -> Option<Self> {
        let text = PRESETS.iter().find(|(n, _)| *n == name)?.1;
        Some(Self::parse(text).expect("built-in scenario parses"))
    }

    pub fn preset_names() -> impl Iterator<Item = &'static str> {
        PRESETS.iter().map(|(n, _)| *n)
    }
}

fn build_side(side: Side, raw: RawSide) -> Result<(MorseDecomposition, GradedMap), ScenarioParseError> {
    if raw.elements.is_empty() {
        return Err(err(0, format!("missing [{side}.elements] section")));
    }
    let labels: Vec<&str> = raw.elements.iter().map(|(l, _, _)| l.as_str()).collect();
    for (i, (l, _, line)) in raw.elements.iter().enumerate() {
        if labels[..i].contains(&l.as_str()) {
            return Err(err(*line, format!("duplicate element {l:?}")));
        }
    }
    for (a, b, line) in &raw.order {
        for x in [a, b] {
            if !labels.contains(&x.as_str()) {
                return Err(err(*line, format!("order mentions unknown element {x:?}")));
            }
        }
    }
    let relations: Vec<(&str, &str)> = raw.order.iter().map(|(a, b, _)| (a.as_str(), b.as_str())).collect();
    let order_line = raw.order.first().map_or(0, |o| o.2);
    let poset = Poset::generated_by(&labels, &relations).map_err(|e| err(order_line, e.to_string()))?;

    let mut sets = Vec::with_capacity(labels.len());
    for (label, desc, line) in &raw.elements {
        let mut hits = raw.index.iter().filter(|(l, _, _)| l == label);
        let (_, index, _) = hits
            .next()
            .ok_or_else(|| err(*line, format!("element {label:?} has no entry in [{side}.index]")))?;
        if let Some((_, _, dup)) = hits.next() {
            return Err(err(*dup, format!("second index for {label:?}")));
        }
        sets.push(MorseSet { label: label.clone(), description: desc.clone(), index: *index });
    }
    for (l, _, line) in &raw.index {
        if !labels.contains(&l.as_str()) {
            return Err(err(*line, format!("index for unknown element {l:?}")));
        }
    }
    let mut decomposition = MorseDecomposition::new(poset, sets).map_err(|e| err(0, e.to_string()))?;
    for (members, index, line) in &raw.intervals {
        let set = decomposition.poset().set_of(members).map_err(|e| err(*line, e.to_string()))?;
        decomposition.prescribe(set, *index).map_err(|e| err(*line, e.to_string()))?;
    }

    let mut connection = GradedMap::zero_connection(&decomposition);
    for (p, q, deg, value, line) in &raw.connection {
        let pi = decomposition.position(p).ok_or_else(|| err(*line, format!("unknown element {p:?}")))?;
        let qi = decomposition.position(q).ok_or_else(|| err(*line, format!("unknown element {q:?}")))?;
        connection.set_block(pi, qi, *deg, *value).map_err(|e| err(*line, e.to_string()))?;
    }
    Ok((decomposition, connection))
}

const PRESETS: [(&str, &str); 4] = [
    ("example4.1", EXAMPLE_4_1),
    ("example4.2-het1", EXAMPLE_4_2_HET1),
    ("example4.2-hom", EXAMPLE_4_2_HOM),
    ("example4.2-het2", EXAMPLE_4_2_HET2),
];

/// d = 0.5, e = 2: the cycle around the origin is destroyed by a saddle loop at (-0.5, 0).
const EXAMPLE_4_1: &str = "\
[scenario]
name = example4.1
theta_before = 0.02
theta_after = 0.04

[before.elements]
1 = sink (-2,0)
pi = stable limit cycle around the origin
2 = saddle (-0.5,0)
3 = source (0,0)
[before.order]
1 < 2
pi < 2
pi < 3
[before.index]
1 = sink
pi = stable-cycle
2 = saddle
3 = source
[before.connection]
D(1,2) = iso
D(pi,2) = iso
D(pi,3) = iso

[after.elements]
1 = sink (-2,0)
2 = saddle (-0.5,0)
3 = source (0,0)
[after.order]
1 < 2
2 < 3
[after.index]
1 = sink
2 = saddle
3 = source
[after.connection]
D(1,2) = 2      # two orbits from the saddle to the sink
D(2,3) = iso

[constraints]
T(1,1) = iso
T(3,3) = iso
";

/// d = -1, e = 2: upper half-plane connection from (-2, 0) to (1, 0).
const EXAMPLE_4_2_HET1: &str = "\
[scenario]
name = example4.2-het1
theta_before = -0.2
theta_after = -0.05

[before.elements]
1 = sink (0,0)
2 = saddle (1,0)
3 = saddle (-2,0)
[before.order]
1 < 2
1 < 3
[before.index]
1 = sink
2 = saddle
3 = saddle
[before.connection]
D(1,2) = iso
D(1,3) = iso

[after.elements]
1 = sink (0,0)
2 = saddle (1,0)
3 = saddle (-2,0)
[after.order]
1 < 2
[after.index]
1 = sink
2 = saddle
3 = saddle
[after.connection]
D(1,2) = iso

[constraints]
T(1,1) = iso
T(2,2) = iso
T(3,3) = iso
";

/// d = -1, e = 2: saddle loop at (1, 0) destroys the cycle around the origin.
const EXAMPLE_4_2_HOM: &str = "\
[scenario]
name = example4.2-hom
theta_before = 0.1
theta_after = 0.2

[before.elements]
pi = stable limit cycle around the origin
1 = saddle (1,0)
2 = saddle (-2,0)
3 = source (0,0)
[before.order]
pi < 1
pi < 3
[before.index]
pi = stable-cycle
1 = saddle
2 = saddle
3 = source
[before.connection]
D(pi,1) = iso
D(pi,3) = iso

[after.elements]
1 = saddle (1,0)
2 = saddle (-2,0)
3 = source (0,0)
[after.order]
1 < 3
[after.index]
1 = saddle
2 = saddle
3 = source
[after.connection]
D(1,3) = iso

[constraints]
T(2,2) = iso
T(3,3) = iso
";

/// d = -1, e = 2: lower half-plane connection from (1, 0) to (-2, 0).
const EXAMPLE_4_2_HET2: &str = "\
[scenario]
name = example4.2-het2
theta_before = 1.1
theta_after = 1.2

[before.elements]
1 = saddle (-2,0)
2 = saddle (1,0)
3 = source (0,0)
[before.order]
2 < 3
[before.index]
1 = saddle
2 = saddle
3 = source
[before.connection]
D(2,3) = iso

[after.elements]
1 = saddle (-2,0)
2 = saddle (1,0)
3 = source (0,0)
[after.order]
1 < 3
2 < 3
[after.index]
1 = saddle
2 = saddle
3 = source
[after.connection]
D(1,3) = iso
D(2,3) = iso

[constraints]
T(1,1) = iso
T(2,2) = iso
T(3,3) = iso
";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        for name in Scenario::preset_names() {
            let s = Scenario::preset(name).unwrap();
            assert_eq!(s.name, name);
            assert!(s.window.is_some());
        }
        assert!(Scenario::preset("nope").is_none());
    }

    #[test]
    fn orbit_counts_reduce_mod_two() {
        let s = Scenario::preset("example4.1").unwrap();
        assert_eq!(s.after_connection.nonzero_entries().len(), 1);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "[scenario]\nname = x\n[before.elements]\n1 = a\n[before.index]\n1 = blob\n";
        let e = Scenario::parse(text).unwrap_err();
        assert_eq!(e.line, 6);
        assert!(e.message.contains("bad index"));

        let e = Scenario::parse("name = x\n").unwrap_err();
        assert_eq!(e.line, 1);

        let text = "[before.elements]\n1\n2\n[before.index]\n1 = sink\n";
        let e = Scenario::parse(text).unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("no entry"));

        let text = "[before.elements]\n1\n[before.index]\n1 = sink\n[before.connection]\nD(1,1\n";
        assert_eq!(Scenario::parse(text).unwrap_err().line, 6);
    }

    #[test]
    fn explicit_ranks_and_degrees() {
        let text = "\
[before.elements]
a
b
[before.order]
a < b
[before.index]
a = 1 1 0
b = 0 1 1
[before.connection]
D(a,b)@1 = iso
[after.elements]
a
[after.index]
a = sink
";
        let s = Scenario::parse(text).unwrap();
        let entries = s.before_connection.nonzero_entries();
        assert_eq!(entries.len(), 1);
        let (r, c) = entries[0];
        assert_eq!(s.before.generator_name(s.before_connection.rows()[r]), "H0(a)");
        assert_eq!(s.before.generator_name(s.before_connection.cols()[c]), "H1(b)");
        assert!(s.window.is_none());

        // without the degree the block is ambiguous
        let ambiguous = text.replace("D(a,b)@1", "D(a,b)");
        assert_eq!(Scenario::parse(&ambiguous).unwrap_err().line, 10);
    }

    #[test]
    fn interval_indices_are_prescribed_and_checked() {
        use crate::conley::validate_connection_matrix;
        let text = "\
[before.elements]
1
2
[before.order]
1 < 2
[before.index]
1 = sink
2 = saddle
{1,2} = 0 0 0
[before.connection]
D(1,2) = iso
[after.elements]
1
[after.index]
1 = sink
";
        let s = Scenario::parse(text).unwrap();
        assert_eq!(s.before.prescribed().len(), 1);
        assert!(validate_connection_matrix(&s.before_connection, &s.before).unwrap().is_valid());

        let wrong = text.replace("{1,2} = 0 0 0", "{1,2} = sink");
        let s = Scenario::parse(&wrong).unwrap();
        let report = validate_connection_matrix(&s.before_connection, &s.before).unwrap();
        assert!(report.violations.iter().any(|v| v.to_string().starts_with("interval homology")));

        let unknown = text.replace("{1,2}", "{1,9}");
        assert_eq!(Scenario::parse(&unknown).unwrap_err().line, 9);
    }
}

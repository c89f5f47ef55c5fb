use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Serialize;

use super::strings::{FamilyStringModule, Orbit, OrbitLength};
use crate::error::{Error, Result};
use crate::graded_poly::grammar::{parse_family, parse_monomial, parse_signed};
use crate::graded_poly::{BracketAtom, FamilyPoincare, Poincare, SignedPoly};

const DEFAULTS: &str = include_str!("../../data/defaults.khr");

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    KnotReduced,
    LinkReduced,
    LinkTotallyReduced,
    Khovanov,
    HomflyPolynomial,
}

impl Kind {
    pub fn word(&self) -> &'static str {
        match self {
            Kind::KnotReduced => "knot-reduced",
            Kind::LinkReduced => "link-reduced",
            Kind::LinkTotallyReduced => "link-totally-reduced",
            Kind::Khovanov => "khovanov",
            Kind::HomflyPolynomial => "homfly-polynomial",
        }
    }

    fn parse(s: &str) -> Option<Kind> {
        [Kind::KnotReduced, Kind::LinkReduced, Kind::LinkTotallyReduced, Kind::Khovanov, Kind::HomflyPolynomial]
            .into_iter()
            .find(|k| k.word() == s)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.word())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RecordValue {
    Family(FamilyPoincare),
    Signed(SignedPoly),
}

impl fmt::Display for RecordValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecordValue::Family(p) => p.fmt(f),
            RecordValue::Signed(p) => p.fmt(f),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HomologyRecord {
    pub name: String,
    pub kind: Kind,
    pub provenance: String,
    pub value: RecordValue,
    pub orbits: Option<FamilyStringModule>,
}

impl HomologyRecord {
    pub fn family(&self) -> Result<&FamilyPoincare> {
        match &self.value {
            RecordValue::Family(f) => Ok(f),
            RecordValue::Signed(_) => Err(self.wrong_kind("a Poincare polynomial")),
        }
    }

    pub fn poincare(&self) -> Result<Poincare> {
        self.family()?.to_poincare()
    }

    pub fn signed(&self) -> Result<&SignedPoly> {
        match &self.value {
            RecordValue::Signed(s) => Ok(s),
            RecordValue::Family(_) => Err(self.wrong_kind("homfly-polynomial")),
        }
    }

    fn wrong_kind(&self, expected: &str) -> Error {
        Error::WrongKind { name: self.name.clone(), expected: expected.into(), found: self.kind.to_string() }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Record(format!("{}: {msg}", self.name)));
        match (&self.value, self.kind) {
            (RecordValue::Signed(s), Kind::HomflyPolynomial) => {
                if s.iter().any(|(d, _)| d.t2 != 0) {
                    return bad("homfly-polynomial records carry no t-grading");
                }
            }
            (RecordValue::Family(f), k) if k != Kind::HomflyPolynomial => {
                let has_half_t = f.terms().any(|(d, _, _)| !d.has_integral_t());
                if k == Kind::Khovanov && f.terms().any(|(d, _, _)| d.a != 0) {
                    return bad("khovanov records carry no a-grading");
                }
                if has_half_t && k != Kind::LinkTotallyReduced {
                    return bad("half-integer t-degrees only in totally reduced link records");
                }
                if k == Kind::KnotReduced && !f.is_atom_free() {
                    return bad("knot records cannot carry bracket atoms");
                }
            }
            _ => return bad("value does not match kind"),
        }
        if let Some(o) = &self.orbits {
            if !o.underlying().sl_equivalent(self.family()?) {
                return bad("orbit presentation does not sum to the value");
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "name: {}\nkind: {}\nprovenance: {}\nvalue: {}\n",
            self.name, self.kind, self.provenance, self.value
        );
        if let Some(o) = &self.orbits {
            s.push_str(&format!("orbits: {o}\n"));
        }
        s
    }
}

/// Parses a record file. Records are separated by blank lines; `#` starts a
/// comment line.
pub fn parse_records(text: &str) -> Result<Vec<HomologyRecord>> {
    let mut out = Vec::new();
    let mut fields: Vec<(usize, &str, &str)> = Vec::new();
    let lines: Vec<&str> = text.lines().collect();
    for (i, raw) in lines.iter().enumerate() {
        let line = raw.trim_end();
        if line.trim_start().starts_with('#') {
            continue;
        }
        if line.trim().is_empty() {
            if !fields.is_empty() {
                out.push(build_record(&fields)?);
                fields.clear();
            }
            continue;
        }
        let Some((key, val)) = line.split_once(':') else {
            return Err(Error::Syntax { line: i + 1, col: 1, msg: "expected `key: value`".into() });
        };
        fields.push((i + 1, key.trim(), val.trim()));
    }
    if !fields.is_empty() {
        out.push(build_record(&fields)?);
    }
    Ok(out)
}

fn relocate(e: Error, line: usize, offset: usize) -> Error {
    match e {
        Error::Syntax { line: l, col, msg } => Error::Syntax { line: line + l - 1, col: col + offset, msg },
        other => other,
    }
}

fn build_record(fields: &[(usize, &str, &str)]) -> Result<HomologyRecord> {
    let first = fields[0].0;
    let order = ["name", "kind", "provenance", "value"];
    for (i, want) in order.iter().enumerate() {
        match fields.get(i) {
            Some((_, k, _)) if k == want => {}
            Some((l, k, _)) => {
                return Err(Error::Syntax { line: *l, col: 1, msg: format!("expected `{want}:`, found `{k}:`") })
            }
            None => return Err(Error::Syntax { line: first, col: 1, msg: format!("record is missing `{want}:`") }),
        }
    }
    if fields.len() > 5 || (fields.len() == 5 && fields[4].1 != "orbits") {
        let (l, k, _) = fields[4];
        return Err(Error::Syntax { line: l, col: 1, msg: format!("unexpected field `{k}:`") });
    }
    let name = fields[0].2.to_string();
    if name.is_empty() || name.chars().any(char::is_whitespace) {
        return Err(Error::Syntax { line: fields[0].0, col: 1, msg: "invalid record name".into() });
    }
    let kind = Kind::parse(fields[1].2).ok_or_else(|| Error::Syntax {
        line: fields[1].0,
        col: 7,
        msg: format!("unknown kind `{}`", fields[1].2),
    })?;
    let (vl, _, vtext) = fields[3];
    let value = if kind == Kind::HomflyPolynomial {
        RecordValue::Signed(parse_signed(vtext).map_err(|e| relocate(e, vl, 7))?)
    } else {
        RecordValue::Family(parse_family(vtext).map_err(|e| relocate(e, vl, 7))?)
    };
    let orbits = match fields.get(4) {
        Some((l, _, text)) => Some(parse_orbits(text).map_err(|e| relocate(e, *l, 8))?),
        None => None,
    };
    let rec = HomologyRecord { name, kind, provenance: fields[2].2.to_string(), value, orbits };
    rec.validate()?;
    Ok(rec)
}

/// `(monomial, length), ...` where length is a positive integer or `N+c`.
pub fn parse_orbits(text: &str) -> Result<FamilyStringModule> {
    let mut orbits = Vec::new();
    let mut rest = text.trim();
    let mut col = 1 + text.len() - text.trim_start().len();
    let err = |col: usize, msg: &str| Error::Syntax { line: 1, col, msg: msg.into() };
    while !rest.is_empty() {
        let body_start = rest.strip_prefix('(').ok_or_else(|| err(col, "expected '('"))?;
        let close = body_start.find(')').ok_or_else(|| err(col, "unclosed '('"))?;
        let body = &body_start[..close];
        let (mono, len) = body.split_once(',').ok_or_else(|| err(col, "expected `(monomial, length)`"))?;
        let center = parse_monomial(mono).map_err(|e| relocate(e, 1, col))?;
        let len = len.trim();
        let length = if let Some(off) = len.strip_prefix('N') {
            let off = off.replace(' ', "");
            let c = if off.is_empty() { 0 } else { off.parse::<i64>().map_err(|_| err(col, "bad bracket length"))? };
            OrbitLength::Bracket(BracketAtom::new(c))
        } else {
            match len.parse::<u64>() {
                Ok(n) if n > 0 => OrbitLength::Fixed(n),
                _ => return Err(err(col, "orbit length must be positive")),
            }
        };
        orbits.push(Orbit { center, length });
        let consumed = 1 + close + 1;
        let after = &rest[consumed..];
        let trimmed = after.trim_start();
        col += consumed + after.len() - trimmed.len();
        rest = match trimmed.strip_prefix(',') {
            Some(r) => {
                col += 1 + r.len() - r.trim_start().len();
                r.trim_start()
            }
            None if trimmed.is_empty() => trimmed,
            None => return Err(err(col, "expected ','")),
        };
    }
    Ok(FamilyStringModule { orbits })
}

/// The record registry. Immutable once built.
#[derive(Clone, Debug)]
pub struct Database {
    records: BTreeMap<String, HomologyRecord>,
    warnings: Vec<String>,
}

impl Database {
    /// Only the embedded records.
    pub fn embedded() -> Database {
        let mut records = BTreeMap::new();
        for r in parse_records(DEFAULTS).expect("embedded records parse") {
            let prev = records.insert(r.name.clone(), r);
            assert!(prev.is_none(), "duplicate embedded record");
        }
        Database { records, warnings: Vec::new() }
    }

    /// Embedded records extended by `text`. Shadowing an existing name needs
    /// `allow_override`; it is then logged as a warning.
    pub fn with_records(text: &str, allow_override: bool) -> Result<Database> {
        let mut db = Database::embedded();
        let mut seen = std::collections::BTreeSet::new();
        for r in parse_records(text)? {
            if !seen.insert(r.name.clone()) {
                return Err(Error::DuplicateName(r.name));
            }
            if db.records.contains_key(&r.name) {
                if !allow_override {
                    return Err(Error::DuplicateName(r.name));
                }
                let w = format!("record `{}` shadows an embedded record", r.name);
                log::warn!("{w}");
                db.warnings.push(w);
            }
            db.records.insert(r.name.clone(), r);
        }
        Ok(db)
    }

    pub fn load(path: &Path, allow_override: bool) -> Result<Database> {
        let text = std::fs::read_to_string(path)?;
        Database::with_records(&text, allow_override)
    }

    pub fn get(&self, name: &str) -> Result<&HomologyRecord> {
        self.records.get(name).ok_or_else(|| Error::UnknownRecord(name.to_string()))
    }

    pub fn family(&self, name: &str) -> Result<&FamilyPoincare> {
        self.get(name)?.family()
    }

    pub fn poincare(&self, name: &str) -> Result<Poincare> {
        self.get(name)?.poincare()
    }

    pub fn signed(&self, name: &str) -> Result<&SignedPoly> {
        self.get(name)?.signed()
    }

    pub fn records(&self) -> impl Iterator<Item = &HomologyRecord> {
        self.records.values()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

impl Default for Database {
    fn default() -> Self {
        Database::embedded()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_round_trip() {
        let db = Database::embedded();
        let text: String = db.records().map(|r| r.to_text() + "\n").collect();
        let again = parse_records(&text).unwrap();
        assert_eq!(again.len(), db.records().count());
        for r in again {
            assert_eq!(&r, db.get(&r.name).unwrap());
        }
    }

    #[test]
    fn trefoil_record() {
        let db = Database::embedded();
        let t = db.poincare("trefoil+").unwrap();
        assert_eq!(t, "a^2 q^-2 + a^2 q^2 t^-2 + a^4 t^-3".parse().unwrap());
        assert_eq!(db.get("kh-L10n36").unwrap().kind, Kind::Khovanov);
    }

    #[test]
    fn empty_file_gives_defaults() {
        let db = Database::with_records("", false).unwrap();
        assert_eq!(db.records().count(), Database::embedded().records().count());
    }

    #[test]
    fn shadowing() {
        let text = "name: unknot\nkind: knot-reduced\nprovenance: test\nvalue: 1\n";
        assert_eq!(Database::with_records(text, false).unwrap_err(), Error::DuplicateName("unknot".into()));
        let db = Database::with_records(text, true).unwrap();
        assert_eq!(db.warnings().len(), 1);
    }

    #[test]
    fn syntax_error_location() {
        let text = "name: x\nkind: knot-reduced\nprovenance: p\nvalue: a + + q\n";
        match Database::with_records(text, false) {
            Err(Error::Syntax { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn kind_checks() {
        let text = "name: x\nkind: khovanov\nprovenance: p\nvalue: a q\n";
        assert!(matches!(Database::with_records(text, false), Err(Error::Record(_))));
        let text = "name: x\nkind: knot-reduced\nprovenance: p\nvalue: t^1/2\n";
        assert!(matches!(Database::with_records(text, false), Err(Error::Record(_))));
    }

    #[test]
    fn orbit_parsing() {
        let o = parse_orbits("(a q^-1, 1), (a^2 q t^-2, N-1)").unwrap();
        assert_eq!(o.orbits.len(), 2);
        assert_eq!(o.orbits[1].length, OrbitLength::Bracket(BracketAtom::new(-1)));
        assert!(parse_orbits("(a, 0)").is_err());
        assert!(parse_orbits("(a, 1) (q, 1)").is_err());
    }
}

//! Reading OR-Library set covering files and the canonical SCP-CS text format.
//!
//! OR-Library layout (whitespace separated, line breaks insignificant):
//! `m n`, then `n` column costs, then for each of the `m` rows a count `t`
//! followed by `t` 1-based column ids.
//!
//! Canonical layout, one record per line:
//!
//! ```text
//! scpcs 1
//! name <name>
//! elements <m>
//! subsets <n>
//! set <j> <cost> <t> <e_1> ... <e_t>      (n lines, 1-based ids)
//! conflicts <|D|>
//! conflict <i> <j> <d_ij>                 (|D| lines, i < j, 1-based)
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{Conflict, Cost, Instance, ModelError};

pub const CANONICAL_MAGIC: &str = "scpcs";
pub const CANONICAL_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IngestError {
    #[error("truncated input: expected {expected} at token {position}")]
    Truncated {
        expected: &'static str,
        position: usize,
    },
    #[error("token {position}: expected a nonnegative integer, found {token:?}")]
    NotAnInteger { position: usize, token: String },
    #[error("token {position}: column {column} out of range 1..={num_cols}")]
    IndexOutOfRange {
        position: usize,
        column: u64,
        num_cols: usize,
    },
    #[error("token {position}: token surplus or bad row count (row {row} declares {count} coverers, {num_cols} columns exist)")]
    BadRowCount {
        position: usize,
        row: usize,
        count: u64,
        num_cols: usize,
    },
    #[error("token {position}: row {row} lists column {column} twice")]
    DuplicateColumn {
        position: usize,
        row: usize,
        column: u64,
    },
    #[error("token {position}: token surplus or bad row count (unexpected trailing data)")]
    TokenSurplus { position: usize },
    #[error("raw instance inconsistent: {0}")]
    Inconsistent(String),
    #[error("not an SCP-CS file (magic {0:?})")]
    BadMagic(String),
    #[error("unsupported SCP-CS format version {0}")]
    UnsupportedVersion(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("count mismatch in {section}: declared {declared}, found {found}")]
    CountMismatch {
        section: &'static str,
        declared: usize,
        found: usize,
    },
    #[error("instance name {0:?} must be non-empty and contain no whitespace")]
    BadName(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A classic set covering instance as stored in OR-Library files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawScpInstance {
    pub num_rows: usize,
    pub num_cols: usize,
    pub col_cost: Vec<Cost>,
    /// Per row, the 1-based ids of the columns covering it.
    pub row_cover_lists: Vec<Vec<usize>>,
}

impl RawScpInstance {
    pub fn validate(&self) -> Result<(), IngestError> {
        if self.col_cost.len() != self.num_cols {
            return Err(IngestError::Inconsistent(format!(
                "{} costs for {} columns",
                self.col_cost.len(),
                self.num_cols
            )));
        }
        if self.row_cover_lists.len() != self.num_rows {
            return Err(IngestError::Inconsistent(format!(
                "{} cover lists for {} rows",
                self.row_cover_lists.len(),
                self.num_rows
            )));
        }
        for (r, row) in self.row_cover_lists.iter().enumerate() {
            if let Some(&c) = row.iter().find(|&&c| c == 0 || c > self.num_cols) {
                return Err(IngestError::Inconsistent(format!(
                    "row {r} lists column {c}, valid range is 1..={}",
                    self.num_cols
                )));
            }
        }
        Ok(())
    }
}

struct Tokens<'a> {
    inner: std::iter::Enumerate<std::str::SplitAsciiWhitespace<'a>>,
    consumed: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        Tokens {
            inner: text.split_ascii_whitespace().enumerate(),
            consumed: 0,
        }
    }

    fn next_int(&mut self, expected: &'static str) -> Result<(usize, u64), IngestError> {
        match self.inner.next() {
            None => Err(IngestError::Truncated {
                expected,
                position: self.consumed + 1,
            }),
            Some((idx, tok)) => {
                self.consumed = idx + 1;
                tok.parse::<u64>()
                    .map(|v| (idx + 1, v))
                    .map_err(|_| IngestError::NotAnInteger {
                        position: idx + 1,
                        token: tok.into(),
                    })
            }
        }
    }

    fn next_count(&mut self, expected: &'static str) -> Result<(usize, usize), IngestError> {
        let (pos, v) = self.next_int(expected)?;
        usize::try_from(v)
            .map(|v| (pos, v))
            .map_err(|_| IngestError::NotAnInteger {
                position: pos,
                token: v.to_string(),
            })
    }
}

/// Parses an OR-Library set covering file. Positions in errors are 1-based
/// token indices.
pub fn parse_orlib(bytes: &[u8]) -> Result<RawScpInstance, IngestError> {
    let text = std::str::from_utf8(bytes).map_err(|e| IngestError::NotAnInteger {
        position: 0,
        token: format!("<invalid utf-8 at byte {}>", e.valid_up_to()),
    })?;
    let mut toks = Tokens::new(text);
    let (_, num_rows) = toks.next_count("row count")?;
    let (_, num_cols) = toks.next_count("column count")?;
    let mut col_cost = Vec::with_capacity(num_cols);
    for _ in 0..num_cols {
        col_cost.push(toks.next_int("column cost")?.1);
    }
    let mut row_cover_lists = Vec::with_capacity(num_rows);
    let mut seen = vec![usize::MAX; num_cols];
    for row in 0..num_rows {
        let (pos, count) = toks.next_int("row cover count")?;
        if count > num_cols as u64 {
            return Err(IngestError::BadRowCount {
                position: pos,
                row,
                count,
                num_cols,
            });
        }
        let mut cols = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let (pos, col) = toks.next_int("column index")?;
            if col == 0 || col > num_cols as u64 {
                return Err(IngestError::IndexOutOfRange {
                    position: pos,
                    column: col,
                    num_cols,
                });
            }
            let c = col as usize;
            if seen[c - 1] == row {
                return Err(IngestError::DuplicateColumn {
                    position: pos,
                    row,
                    column: col,
                });
            }
            seen[c - 1] = row;
            cols.push(c);
        }
        row_cover_lists.push(cols);
    }
    if let Some((idx, _)) = toks.inner.next() {
        return Err(IngestError::TokenSurplus { position: idx + 1 });
    }
    Ok(RawScpInstance {
        num_rows,
        num_cols,
        col_cost,
        row_cover_lists,
    })
}

/// Writes a raw instance back in OR-Library layout.
pub fn write_orlib(raw: &RawScpInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, " {} {}", raw.num_rows, raw.num_cols);
    write_wrapped(&mut out, raw.col_cost.iter());
    for row in &raw.row_cover_lists {
        let _ = writeln!(out, " {}", row.len());
        write_wrapped(&mut out, row.iter());
    }
    out
}

fn write_wrapped<T: std::fmt::Display>(out: &mut String, items: impl Iterator<Item = T>) {
    let mut on_line = 0;
    for item in items {
        let _ = write!(out, " {item}");
        on_line += 1;
        if on_line == 12 {
            out.push('\n');
            on_line = 0;
        }
    }
    if on_line > 0 {
        out.push('\n');
    }
}

/// Converts a raw instance into a conflict-free [`Instance`] with 0-based ids.
pub fn to_instance(raw: &RawScpInstance, name: &str) -> Result<Instance, IngestError> {
    raw.validate()?;
    let mut members = vec![Vec::new(); raw.num_cols];
    for (row, cols) in raw.row_cover_lists.iter().enumerate() {
        for &c in cols {
            members[c - 1].push(row);
        }
    }
    Ok(Instance::new(
        name,
        raw.num_rows,
        raw.col_cost.clone(),
        members,
        Vec::new(),
    )?)
}

/// Serializes an instance in the canonical SCP-CS format.
pub fn write_canonical(inst: &Instance) -> Result<String, IngestError> {
    let name = inst.name();
    if name.is_empty() || name.chars().any(char::is_whitespace) {
        return Err(IngestError::BadName(name.to_string()));
    }
    let mut out = String::new();
    let _ = writeln!(out, "{CANONICAL_MAGIC} {CANONICAL_VERSION}");
    let _ = writeln!(out, "name {name}");
    let _ = writeln!(out, "elements {}", inst.num_elements());
    let _ = writeln!(out, "subsets {}", inst.num_subsets());
    for j in 0..inst.num_subsets() {
        let members = inst.members(j);
        let _ = write!(out, "set {} {} {}", j + 1, inst.cost(j), members.len());
        for e in members {
            let _ = write!(out, " {}", e + 1);
        }
        out.push('\n');
    }
    let _ = writeln!(out, "conflicts {}", inst.conflicts().len());
    for c in inst.conflicts() {
        let _ = writeln!(out, "conflict {} {} {}", c.i + 1, c.j + 1, c.penalty);
    }
    Ok(out)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line_no: usize,
}

impl<'a> Lines<'a> {
    fn next_fields(&mut self, what: &str) -> Result<Vec<&'a str>, IngestError> {
        for (idx, line) in self.inner.by_ref() {
            self.line_no = idx + 1;
            let fields: Vec<&str> = line.split_ascii_whitespace().collect();
            if !fields.is_empty() {
                return Ok(fields);
            }
        }
        Err(IngestError::Syntax {
            line: self.line_no + 1,
            message: format!("unexpected end of file, expected {what}"),
        })
    }

    fn syntax(&self, message: impl Into<String>) -> IngestError {
        IngestError::Syntax {
            line: self.line_no,
            message: message.into(),
        }
    }

    fn keyword_value(&mut self, keyword: &str) -> Result<&'a str, IngestError> {
        let fields = self.next_fields(keyword)?;
        match fields.as_slice() {
            [k, v] if *k == keyword => Ok(v),
            _ => Err(self.syntax(format!("expected `{keyword} <value>`"))),
        }
    }

    fn number<T: std::str::FromStr>(&self, tok: &str) -> Result<T, IngestError> {
        tok.parse()
            .map_err(|_| self.syntax(format!("expected an integer, found {tok:?}")))
    }
}

/// Parses the canonical SCP-CS format produced by [`write_canonical`].
pub fn read_canonical(bytes: &[u8]) -> Result<Instance, IngestError> {
    let text = std::str::from_utf8(bytes).map_err(|e| IngestError::Syntax {
        line: 0,
        message: format!("invalid utf-8: {e}"),
    })?;
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line_no: 0,
    };

    let header = lines.next_fields("header")?;
    if header.first() != Some(&CANONICAL_MAGIC) {
        return Err(IngestError::BadMagic(
            header.first().unwrap_or(&"").to_string(),
        ));
    }
    match header.as_slice() {
        [_, v] if v.parse::<u32>().ok() == Some(CANONICAL_VERSION) => {}
        [_, v] => return Err(IngestError::UnsupportedVersion(v.to_string())),
        _ => return Err(IngestError::UnsupportedVersion(header[1..].join(" "))),
    }
    let name = lines.keyword_value("name")?.to_string();
    let m: usize = {
        let v = lines.keyword_value("elements")?.to_string();
        lines.number(&v)?
    };
    let n: usize = {
        let v = lines.keyword_value("subsets")?.to_string();
        lines.number(&v)?
    };

    let mut cost = Vec::with_capacity(n);
    let mut members = Vec::with_capacity(n);
    let mut fields = lines.next_fields("set or conflicts")?;
    while fields[0] == "set" {
        if fields.len() < 4 {
            return Err(lines.syntax("expected `set <j> <cost> <t> <e_1> ... <e_t>`"));
        }
        let j: usize = lines.number(fields[1])?;
        if j != members.len() + 1 {
            return Err(lines.syntax(format!("expected set {}, found set {j}", members.len() + 1)));
        }
        cost.push(lines.number::<Cost>(fields[2])?);
        let t: usize = lines.number(fields[3])?;
        if fields.len() - 4 != t {
            return Err(IngestError::CountMismatch {
                section: "set members",
                declared: t,
                found: fields.len() - 4,
            });
        }
        let mut set = Vec::with_capacity(t);
        for tok in &fields[4..] {
            let e: usize = lines.number(tok)?;
            if e == 0 || e > m {
                return Err(lines.syntax(format!("element {e} out of range 1..={m}")));
            }
            set.push(e - 1);
        }
        members.push(set);
        fields = lines.next_fields("set or conflicts")?;
    }
    if members.len() != n {
        return Err(IngestError::CountMismatch {
            section: "subsets",
            declared: n,
            found: members.len(),
        });
    }
    let declared: usize = match fields.as_slice() {
        ["conflicts", d] => lines.number(d)?,
        _ => return Err(lines.syntax("expected `conflicts <count>`")),
    };
    let mut conflicts = Vec::with_capacity(declared);
    while let Ok(fields) = lines.next_fields("conflict") {
        match fields.as_slice() {
            ["conflict", i, j, d] => {
                let (i, j, d): (usize, usize, Cost) =
                    (lines.number(i)?, lines.number(j)?, lines.number(d)?);
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(lines.syntax(format!("conflict ({i}, {j}) out of range 1..={n}")));
                }
                conflicts.push(Conflict::new(i - 1, j - 1, d));
            }
            _ => return Err(lines.syntax("expected `conflict <i> <j> <d>`")),
        }
    }
    if conflicts.len() != declared {
        return Err(IngestError::CountMismatch {
            section: "conflicts",
            declared,
            found: conflicts.len(),
        });
    }
    Ok(Instance::new(name, m, cost, members, conflicts)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Violation;
    use proptest::prelude::*;

    #[test]
    fn parses_small_file() {
        let raw = parse_orlib(b"2 3\n1 1 1\n2 1 2\n2 2 3\n").unwrap();
        assert_eq!(raw.num_rows, 2);
        assert_eq!(raw.num_cols, 3);
        assert_eq!(raw.col_cost, vec![1, 1, 1]);
        assert_eq!(raw.row_cover_lists, vec![vec![1, 2], vec![2, 3]]);

        let inst = to_instance(&raw, "small").unwrap();
        assert_eq!(inst.all_members(), &[vec![0], vec![0, 1], vec![1]]);
        assert!(!inst.has_conflicts());
    }

    #[test]
    fn row_count_larger_than_columns() {
        let err = parse_orlib(b"1 1\n1\n2 1 1\n").unwrap_err();
        assert!(
            err.to_string().contains("token surplus or bad row count"),
            "{err}"
        );
    }

    #[test]
    fn distinct_parse_errors() {
        assert!(matches!(
            parse_orlib(b"2 3 1 1"),
            Err(IngestError::Truncated {
                expected: "column cost",
                position: 5
            })
        ));
        assert!(matches!(
            parse_orlib(b"1 2 1 x 1 1"),
            Err(IngestError::NotAnInteger { position: 4, .. })
        ));
        assert!(matches!(
            parse_orlib(b"1 2 1 1 1 3"),
            Err(IngestError::IndexOutOfRange {
                position: 6,
                column: 3,
                ..
            })
        ));
        assert!(matches!(
            parse_orlib(b"1 2 1 1 1 2 9"),
            Err(IngestError::TokenSurplus { position: 7 })
        ));
        assert!(matches!(
            parse_orlib(b"1 2 1 1 2 2 2"),
            Err(IngestError::DuplicateColumn { position: 7, .. })
        ));
        assert!(matches!(
            parse_orlib(b"1 2 -1 1 1 1"),
            Err(IngestError::NotAnInteger { .. })
        ));
    }

    #[test]
    fn raw_with_bad_column_is_rejected() {
        let raw = RawScpInstance {
            num_rows: 1,
            num_cols: 3,
            col_cost: vec![1, 1, 1],
            row_cover_lists: vec![vec![5]],
        };
        assert!(matches!(
            to_instance(&raw, "bad"),
            Err(IngestError::Inconsistent(_))
        ));
    }

    #[test]
    fn zero_cost_columns_are_accepted() {
        let raw = parse_orlib(b"1 2 0 3 1 1").unwrap();
        assert_eq!(to_instance(&raw, "z").unwrap().cost(0), 0);
    }

    #[test]
    fn uncovered_row_is_data_not_error() {
        let inst = to_instance(&parse_orlib(b"2 1 4 1 1 0").unwrap(), "u").unwrap();
        assert_eq!(
            crate::model::validate_instance(&inst),
            vec![Violation::Uncoverable { element: 1 }]
        );
    }

    #[test]
    fn canonical_round_trip_of_toy() {
        let inst = crate::toy::fig1_instance(1, 10);
        let text = write_canonical(&inst).unwrap();
        assert!(text.starts_with("scpcs 1\nname fig1\nelements 6\nsubsets 6\nset 1 1 2 1 4\n"));
        assert_eq!(read_canonical(text.as_bytes()).unwrap(), inst);
    }

    #[test]
    fn canonical_keeps_conflict_order() {
        let inst = Instance::new(
            "three",
            2,
            vec![1, 2, 3],
            vec![vec![0], vec![0, 1], vec![1]],
            vec![
                Conflict::new(1, 2, 4),
                Conflict::new(0, 2, 9),
                Conflict::new(0, 1, 3),
            ],
        )
        .unwrap();
        let text = write_canonical(&inst).unwrap();
        assert!(text.ends_with("conflicts 3\nconflict 1 2 3\nconflict 1 3 9\nconflict 2 3 4\n"));
        let back = read_canonical(text.as_bytes()).unwrap();
        assert_eq!(back.conflicts(), inst.conflicts());
    }

    #[test]
    fn conflict_free_file_has_empty_section() {
        let inst = Instance::new("free", 1, vec![1], vec![vec![0]], vec![]).unwrap();
        let text = write_canonical(&inst).unwrap();
        assert!(text.lines().any(|l| l == "conflicts 0"));
    }

    #[test]
    fn canonical_rejects_bad_headers_and_counts() {
        assert!(matches!(
            read_canonical(b"scp 1\n"),
            Err(IngestError::BadMagic(_))
        ));
        assert!(matches!(
            read_canonical(b"scpcs 2\n"),
            Err(IngestError::UnsupportedVersion(_))
        ));
        let text = "scpcs 1\nname a\nelements 1\nsubsets 2\nset 1 1 1 1\nconflicts 0\n";
        assert!(matches!(
            read_canonical(text.as_bytes()),
            Err(IngestError::CountMismatch {
                section: "subsets",
                declared: 2,
                found: 1
            })
        ));
        let text = "scpcs 1\nname a\nelements 1\nsubsets 1\nset 1 1 1 1\nconflicts 1\n";
        assert!(matches!(
            read_canonical(text.as_bytes()),
            Err(IngestError::CountMismatch {
                section: "conflicts",
                declared: 1,
                found: 0
            })
        ));
        let text = "scpcs 1\nname a\nelements 1\nsubsets 1\nset 1 1 2 1\nconflicts 0\n";
        assert!(matches!(
            read_canonical(text.as_bytes()),
            Err(IngestError::CountMismatch {
                section: "set members",
                ..
            })
        ));
        let inst = Instance::new("has space", 1, vec![1], vec![vec![0]], vec![]).unwrap();
        assert!(matches!(
            write_canonical(&inst),
            Err(IngestError::BadName(_))
        ));
    }

    fn arb_raw() -> impl Strategy<Value = RawScpInstance> {
        (1usize..8, 1usize..10).prop_flat_map(|(m, n)| {
            (
                proptest::collection::vec(0u64..100, n),
                proptest::collection::vec(
                    proptest::sample::subsequence((1..=n).collect::<Vec<_>>(), 0..=n),
                    m,
                ),
            )
                .prop_map(move |(col_cost, rows)| RawScpInstance {
                    num_rows: m,
                    num_cols: n,
                    col_cost,
                    row_cover_lists: rows,
                })
        })
    }

    proptest! {
        #[test]
        fn canonical_round_trip(inst in crate::model::tests::arb_instance(8, 10)) {
            let text = write_canonical(&inst).unwrap();
            prop_assert_eq!(read_canonical(text.as_bytes()).unwrap(), inst);
        }

        #[test]
        fn orlib_round_trip(raw in arb_raw()) {
            prop_assert_eq!(parse_orlib(write_orlib(&raw).as_bytes()).unwrap(), raw);
        }

        #[test]
        fn line_breaks_do_not_matter(raw in arb_raw(), breaks in proptest::collection::vec(any::<bool>(), 64)) {
            let text = write_orlib(&raw);
            let mut k = 0;
            let reflowed: String = text.split_ascii_whitespace().map(|t| {
                k += 1;
                let sep = if breaks[k % breaks.len()] { "\n" } else { "  \t" };
                format!("{t}{sep}")
            }).collect();
            prop_assert_eq!(parse_orlib(reflowed.as_bytes()).unwrap(), raw);
        }
    }
}

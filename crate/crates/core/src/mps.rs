//! Deterministic MPS export of the flow LP, and a reader for the same
//! dialect so files round-trip byte-identically.
//!
//! Naming: the problem is `FLOWSAT{nn}{U|P}` (capacity mode in the last
//! character); conservation rows are `E{kk}{ii}`, source columns `S{kk}`,
//! sink columns `T{kk}` and arc columns `F{kk}{ii}{jj}`, all 1-based and
//! zero-padded. Two digits per index caps export at n = 49, far beyond the
//! monolithic solve range. The objective row is `COST`, maximized via
//! OBJSENSE. Right-hand sides are all zero, so the RHS section is empty.

use std::fmt::Write as _;

use crate::lp_model::{row_index, CapacityMode, FlowVar, LpInstance};
use crate::{Error, Result};

fn var_name(v: FlowVar) -> String {
    match v {
        FlowVar::Source { k } => format!("S{k:02}"),
        FlowVar::Sink { k } => format!("T{k:02}"),
        FlowVar::Arc { k, tail, head } => format!("F{k:02}{tail:02}{head:02}"),
    }
}

fn row_name(k: u32, i: u32) -> String {
    format!("E{k:02}{i:02}")
}

/// Serialize a monolithic flow LP as fixed-layout MPS text.
pub fn to_mps(lp: &LpInstance) -> Result<String> {
    if lp.commodity.is_some() {
        return Err(Error::domain("MPS export expects the monolithic LP"));
    }
    if lp.n > 49 {
        return Err(Error::domain(
            "MPS export limited to n <= 49 by the two-digit name scheme",
        ));
    }
    let n = lp.n;
    let tn = 2 * n;
    let mode = match lp.capacity {
        CapacityMode::UnitCapped => 'U',
        CapacityMode::PaperFaithful => 'P',
    };
    let mut out = String::new();
    let _ = writeln!(out, "NAME          FLOWSAT{n:02}{mode}");
    out.push_str("OBJSENSE\n    MAX\n");
    out.push_str("ROWS\n N  COST\n");
    for k in 1..=tn {
        for i in 1..=tn {
            let _ = writeln!(out, " E  {}", row_name(k, i));
        }
    }

    // Per-column view of the rows.
    let mut col_entries: Vec<Vec<(usize, i8)>> = vec![Vec::new(); lp.num_vars];
    for (r, row) in lp.rows.iter().enumerate() {
        for &(c, coef) in row {
            col_entries[c as usize].push((r, coef));
        }
    }
    out.push_str("COLUMNS\n");
    for col in 0..lp.num_vars {
        let name = var_name(lp.var_of_column(col));
        if lp.objective[col] != 0 {
            let _ = writeln!(out, "    {:<10}{:<10}{}", name, "COST", lp.objective[col]);
        }
        for &(r, coef) in &col_entries[col] {
            let k = (r / tn as usize) as u32 + 1;
            let i = (r % tn as usize) as u32 + 1;
            let _ = writeln!(out, "    {:<10}{:<10}{}", name, row_name(k, i), coef);
        }
    }
    out.push_str("RHS\n");
    out.push_str("BOUNDS\n");
    for col in 0..lp.num_vars {
        if let Some(u) = lp.upper[col] {
            let name = var_name(lp.var_of_column(col));
            if u == 0 {
                let _ = writeln!(out, " FX {:<10}{:<10}0", "BND", name);
            } else {
                let _ = writeln!(out, " UP {:<10}{:<10}{}", "BND", name, u);
            }
        }
    }
    out.push_str("ENDATA\n");
    Ok(out)
}

fn parse_var_name(name: &str, lineno: usize) -> Result<FlowVar> {
    let bad = || Error::parse(lineno, format!("unrecognized column name '{name}'"));
    let digits = |s: &str| -> Result<u32> { s.parse::<u32>().map_err(|_| bad()) };
    match name.split_at(1) {
        ("S", rest) if rest.len() == 2 => Ok(FlowVar::Source { k: digits(rest)? }),
        ("T", rest) if rest.len() == 2 => Ok(FlowVar::Sink { k: digits(rest)? }),
        ("F", rest) if rest.len() == 6 => Ok(FlowVar::Arc {
            k: digits(&rest[0..2])?,
            tail: digits(&rest[2..4])?,
            head: digits(&rest[4..6])?,
        }),
        _ => Err(bad()),
    }
}

fn parse_row_name(name: &str, lineno: usize) -> Result<(u32, u32)> {
    if name.len() != 5 || !name.starts_with('E') {
        return Err(Error::parse(lineno, format!("unrecognized row name '{name}'")));
    }
    let k = name[1..3]
        .parse::<u32>()
        .map_err(|_| Error::parse(lineno, "bad row commodity index"))?;
    let i = name[3..5]
        .parse::<u32>()
        .map_err(|_| Error::parse(lineno, "bad row vertex index"))?;
    Ok((k, i))
}

fn in_range(code: u32, n: u32) -> bool {
    (1..=2 * n).contains(&code)
}

fn validated_column(lp: &LpInstance, var: FlowVar, lineno: usize) -> Result<usize> {
    let n = lp.n;
    let ok = match var {
        FlowVar::Source { k } | FlowVar::Sink { k } => in_range(k, n),
        FlowVar::Arc { k, tail, head } => {
            in_range(k, n) && in_range(tail, n) && in_range(head, n) && tail != head
        }
    };
    if !ok {
        return Err(Error::parse(lineno, "column indices out of range for this n"));
    }
    lp.column_of_var(var)
        .ok_or_else(|| Error::parse(lineno, "column outside the instance"))
}

/// Parse MPS text written by [`to_mps`] back into an [`LpInstance`].
pub fn from_mps(text: &str) -> Result<LpInstance> {
    let mut n: Option<u32> = None;
    let mut capacity = CapacityMode::UnitCapped;
    let mut lp: Option<LpInstance> = None;
    let mut section = String::new();
    let mut saw_max = false;
    let mut coef_entries = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let is_header = !raw.starts_with(' ');
        if is_header {
            let mut parts = raw.split_whitespace();
            section = parts.next().unwrap_or("").to_string();
            if section == "NAME" {
                let name = parts.next().unwrap_or("");
                if let Some(rest) = name.strip_prefix("FLOWSAT") {
                    if rest.len() == 3 {
                        n = rest[0..2].parse::<u32>().ok();
                        capacity = match &rest[2..3] {
                            "U" => CapacityMode::UnitCapped,
                            "P" => CapacityMode::PaperFaithful,
                            _ => return Err(Error::parse(lineno, "bad capacity tag in NAME")),
                        };
                    }
                }
                let n = n.ok_or_else(|| {
                    Error::parse(lineno, "NAME must look like FLOWSATnnU or FLOWSATnnP")
                })?;
                let mut instance = crate::lp_model::build(n, capacity)?;
                // Bounds and objective come from the file sections.
                instance.upper = vec![None; instance.num_vars];
                lp = Some(instance);
            }
            continue;
        }

        let fields: Vec<&str> = raw.split_whitespace().collect();
        match section.as_str() {
            "OBJSENSE" => {
                if fields == ["MAX"] {
                    saw_max = true;
                } else {
                    return Err(Error::parse(lineno, "only OBJSENSE MAX is supported"));
                }
            }
            "ROWS" => {
                // Structure is regenerated from n; names are validated only.
                match fields.as_slice() {
                    ["N", "COST"] => {}
                    ["E", name] => {
                        parse_row_name(name, lineno)?;
                    }
                    _ => return Err(Error::parse(lineno, "unsupported ROWS entry")),
                }
            }
            "COLUMNS" => {
                let lp = lp
                    .as_mut()
                    .ok_or_else(|| Error::parse(lineno, "COLUMNS before NAME"))?;
                if fields.len() != 3 {
                    return Err(Error::parse(lineno, "expected 'column row value'"));
                }
                let var = parse_var_name(fields[0], lineno)?;
                let col = validated_column(lp, var, lineno)?;
                let value: i64 = fields[2]
                    .parse()
                    .map_err(|_| Error::parse(lineno, "bad numeric value"))?;
                if fields[1] == "COST" {
                    lp.objective[col] = value;
                } else {
                    let (k, i) = parse_row_name(fields[1], lineno)?;
                    if !in_range(k, lp.n) || !in_range(i, lp.n) {
                        return Err(Error::parse(lineno, "row indices out of range for this n"));
                    }
                    let r = row_index(k, i, lp.n);
                    let expected = lp.rows[r]
                        .iter()
                        .find(|&&(c, _)| c as usize == col)
                        .map(|&(_, coef)| coef as i64);
                    if expected != Some(value) {
                        return Err(Error::parse(
                            lineno,
                            "coefficient disagrees with the flow structure",
                        ));
                    }
                    coef_entries += 1;
                }
            }
            "RHS" => {
                return Err(Error::parse(lineno, "nonzero RHS is not part of this dialect"));
            }
            "BOUNDS" => {
                let lp = lp
                    .as_mut()
                    .ok_or_else(|| Error::parse(lineno, "BOUNDS before NAME"))?;
                if fields.len() != 4 || fields[1] != "BND" {
                    return Err(Error::parse(lineno, "expected 'UP|FX BND column value'"));
                }
                let var = parse_var_name(fields[2], lineno)?;
                let col = validated_column(lp, var, lineno)?;
                let value: i64 = fields[3]
                    .parse()
                    .map_err(|_| Error::parse(lineno, "bad bound value"))?;
                match fields[0] {
                    "UP" => lp.upper[col] = Some(value),
                    "FX" if value == 0 => lp.upper[col] = Some(0),
                    _ => return Err(Error::parse(lineno, "unsupported bound type")),
                }
            }
            "ENDATA" => {}
            other => {
                return Err(Error::parse(lineno, format!("unexpected section '{other}'")));
            }
        }
    }

    if !saw_max {
        return Err(Error::parse(0, "missing OBJSENSE MAX"));
    }
    let lp = lp.ok_or_else(|| Error::parse(0, "missing NAME section"))?;
    let expected: usize = lp.rows.iter().map(Vec::len).sum();
    if coef_entries != expected {
        return Err(Error::parse(
            0,
            format!("file lists {coef_entries} coefficients, structure has {expected}"),
        ));
    }
    Ok(lp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Formula;
    use crate::lp_model::{self, CapacityMode};

    #[test]
    fn export_counts_sections() {
        let lp = lp_model::build(2, CapacityMode::PaperFaithful).unwrap();
        let text = to_mps(&lp).unwrap();
        let e_rows = text.lines().filter(|l| l.starts_with(" E  ")).count();
        assert_eq!(e_rows, 16);
        let cols: std::collections::BTreeSet<&str> = text
            .lines()
            .skip_while(|l| !l.starts_with("COLUMNS"))
            .take_while(|l| !l.starts_with("RHS"))
            .filter(|l| l.starts_with("    "))
            .map(|l| l.split_whitespace().next().unwrap())
            .collect();
        assert_eq!(cols.len(), 56);
        assert!(text.contains("OBJSENSE\n    MAX"));
        // Paper mode: only the 2n sources carry bounds.
        let bounds = text.lines().filter(|l| l.starts_with(" UP")).count();
        assert_eq!(bounds, 4);
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let f = Formula::from_dimacs_pairs(2, &[(1, 2), (-1, 2)]).unwrap();
        for cap in [CapacityMode::UnitCapped, CapacityMode::PaperFaithful] {
            let lp = lp_model::build_for_formula(&f, cap).unwrap();
            let text = to_mps(&lp).unwrap();
            let back = from_mps(&text).unwrap();
            assert_eq!(back, lp);
            assert_eq!(to_mps(&back).unwrap(), text);
        }
    }

    #[test]
    fn round_trip_face_fixed() {
        let f = Formula::from_dimacs_pairs(2, &[(1, 2)]).unwrap();
        let lp = lp_model::build_for_formula(&f, CapacityMode::UnitCapped).unwrap();
        let fixed = lp_model::apply_face_fixing(&lp, &f).unwrap();
        let text = to_mps(&fixed).unwrap();
        assert!(text.lines().any(|l| l.starts_with(" FX")));
        let back = from_mps(&text).unwrap();
        assert_eq!(back, fixed);
        assert_eq!(to_mps(&back).unwrap(), text);
    }

    #[test]
    fn zero_objective_exports_cleanly() {
        let lp = lp_model::build(2, CapacityMode::UnitCapped).unwrap();
        let text = to_mps(&lp).unwrap();
        let cost_entries = text
            .lines()
            .filter(|l| l.starts_with("    "))
            .filter(|l| l.split_whitespace().nth(1) == Some("COST"))
            .count();
        assert_eq!(cost_entries, 0);
        let back = from_mps(&text).unwrap();
        assert_eq!(back, lp);
    }

    #[test]
    fn reader_rejects_foreign_text() {
        assert!(from_mps("NAME  OTHER\nENDATA\n").is_err());
        let lp = lp_model::build(2, CapacityMode::UnitCapped).unwrap();
        let text = to_mps(&lp).unwrap();
        let tampered = text.replace("E0101", "E0199");
        assert!(from_mps(&tampered).is_err());
    }
}

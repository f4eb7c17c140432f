use std::fmt::Write as _;

use super::{Nurse, NurseInstance, NurseInstanceParts, ShiftPattern, GRADES, SHIFTS};
use crate::error::{parse_err, Error, Result};
use crate::problem::Gene;

/// Parses the line-oriented nurse instance format.
///
/// ```text
/// NURSE <nurse_count> <pattern_count>
/// PAT <id> <14 chars of 0/1>
/// N <index> <grade> <admissible ids...>
/// C <nurse> <pattern> <cost>
/// D <shift> <band> <value>
/// H <shift> <grade> <value>
/// ```
///
/// Indices are zero-based; grades and bands are 1..=3. `#` starts a comment.
pub fn parse_nurse_instance(text: &str) -> Result<NurseInstance> {
    let mut header: Option<(usize, usize)> = None;
    let mut patterns: Vec<Option<ShiftPattern>> = Vec::new();
    let mut nurses: Vec<Option<Nurse>> = Vec::new();
    let mut costs = Vec::new();
    let mut demand = [[0u32; GRADES]; SHIFTS];
    let mut demand_seen = [[false; GRADES]; SHIFTS];
    let mut headcount = [[0u32; GRADES]; SHIFTS];
    let mut headcount_seen = [[false; GRADES]; SHIFTS];

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let tag = tokens.next().unwrap_or_default();
        let fields: Vec<&str> = tokens.collect();

        if tag != "NURSE" && header.is_none() {
            return Err(parse_err(line_no, "expected NURSE header before any record"));
        }
        match tag {
            "NURSE" => {
                if header.is_some() {
                    return Err(parse_err(line_no, "duplicate NURSE header"));
                }
                expect_len(line_no, &fields, 2, "NURSE <nurse_count> <pattern_count>")?;
                let n = num(line_no, fields[0])?;
                let p = num(line_no, fields[1])?;
                header = Some((n, p));
                nurses = vec![None; n];
                patterns = vec![None; p];
            }
            "PAT" => {
                expect_len(line_no, &fields, 2, "PAT <id> <14 chars of 0/1>")?;
                let id = index(line_no, fields[0], patterns.len(), "pattern")?;
                let bits = fields[1];
                if bits.len() != SHIFTS || !bits.bytes().all(|b| b == b'0' || b == b'1') {
                    return Err(parse_err(line_no, "pattern mask must be 14 characters of 0/1"));
                }
                let mask = bits
                    .bytes()
                    .enumerate()
                    .fold(0u16, |m, (k, b)| if b == b'1' { m | 1 << k } else { m });
                if patterns[id].is_some() {
                    return Err(parse_err(line_no, format!("pattern {id} defined twice")));
                }
                let pattern = ShiftPattern::from_mask(mask)
                    .map_err(|e| Error::Validation(format!("pattern {id}: {}", strip(e))))?;
                patterns[id] = Some(pattern);
            }
            "N" => {
                if fields.len() < 3 {
                    return Err(parse_err(line_no, "expected N <index> <grade> <admissible ids...>"));
                }
                let id = index(line_no, fields[0], nurses.len(), "nurse")?;
                let grade = num(line_no, fields[1])?;
                if !(1..=GRADES).contains(&grade) {
                    return Err(Error::Validation(format!("nurse {id} has grade {grade} outside 1..=3")));
                }
                let admissible = fields[2..]
                    .iter()
                    .map(|f| num(line_no, f).map(|v| v as Gene))
                    .collect::<Result<Vec<_>>>()?;
                if nurses[id].is_some() {
                    return Err(parse_err(line_no, format!("nurse {id} defined twice")));
                }
                nurses[id] = Some(Nurse {
                    grade: grade as u8,
                    admissible,
                });
            }
            "C" => {
                expect_len(line_no, &fields, 3, "C <nurse> <pattern> <cost>")?;
                let n = index(line_no, fields[0], nurses.len(), "nurse")?;
                let p = index(line_no, fields[1], patterns.len(), "pattern")?;
                let c = num(line_no, fields[2])?;
                costs.push((n, p, u32::try_from(c).unwrap_or(u32::MAX)));
            }
            "D" | "H" => {
                expect_len(line_no, &fields, 3, &format!("{tag} <shift> <grade> <value>"))?;
                let k = index(line_no, fields[0], SHIFTS, "shift")?;
                let s = num(line_no, fields[1])?;
                if !(1..=GRADES).contains(&s) {
                    return Err(parse_err(line_no, format!("band {s} outside 1..=3")));
                }
                let v = u32::try_from(num(line_no, fields[2])?)
                    .map_err(|_| parse_err(line_no, "value too large"))?;
                let (table, seen) = if tag == "D" {
                    (&mut demand, &mut demand_seen)
                } else {
                    (&mut headcount, &mut headcount_seen)
                };
                if seen[k][s - 1] {
                    return Err(parse_err(line_no, format!("{tag} {k} {s} given twice")));
                }
                seen[k][s - 1] = true;
                table[k][s - 1] = v;
            }
            other => return Err(parse_err(line_no, format!("unknown record tag `{other}`"))),
        }
    }

    if header.is_none() {
        return Err(parse_err(1, "missing NURSE header"));
    }
    let patterns = patterns
        .into_iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| Error::Validation(format!("pattern {i} is not defined"))))
        .collect::<Result<Vec<_>>>()?;
    let nurses = nurses
        .into_iter()
        .enumerate()
        .map(|(i, n)| n.ok_or_else(|| Error::Validation(format!("nurse {i} is not defined"))))
        .collect::<Result<Vec<_>>>()?;

    NurseInstance::from_parts(NurseInstanceParts {
        patterns,
        nurses,
        costs,
        demand,
        headcount,
    })
}

/// Renders an instance so that `parse_nurse_instance(render(x)) == x`.
pub fn render_nurse_instance(instance: &NurseInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NURSE {} {}", instance.nurse_count(), instance.pattern_count());
    for (id, p) in instance.patterns().iter().enumerate() {
        let bits: String = (0..SHIFTS).map(|k| if p.works(k) { '1' } else { '0' }).collect();
        let _ = writeln!(out, "PAT {id} {bits}");
    }
    for (id, nurse) in instance.nurses().iter().enumerate() {
        let _ = write!(out, "N {id} {}", nurse.grade);
        for p in &nurse.admissible {
            let _ = write!(out, " {p}");
        }
        out.push('\n');
    }
    for (id, nurse) in instance.nurses().iter().enumerate() {
        for &p in &nurse.admissible {
            let c = instance.cost(id, p as usize).unwrap_or_default();
            let _ = writeln!(out, "C {id} {p} {c}");
        }
    }
    for k in 0..SHIFTS {
        for band in 1..=GRADES as u8 {
            let d = instance.demand(k, band);
            if d != 0 {
                let _ = writeln!(out, "D {k} {band} {d}");
            }
        }
    }
    for k in 0..SHIFTS {
        for grade in 1..=GRADES as u8 {
            let h = instance.headcount(k, grade);
            if h != 0 {
                let _ = writeln!(out, "H {k} {grade} {h}");
            }
        }
    }
    out
}

fn expect_len(line: usize, fields: &[&str], n: usize, usage: &str) -> Result<()> {
    if fields.len() != n {
        return Err(parse_err(line, format!("expected {usage}")));
    }
    Ok(())
}

fn num(line: usize, token: &str) -> Result<usize> {
    token
        .parse::<usize>()
        .map_err(|_| parse_err(line, format!("`{token}` is not a non-negative integer")))
}

fn index(line: usize, token: &str, bound: usize, what: &str) -> Result<usize> {
    let v = num(line, token)?;
    if v >= bound {
        return Err(parse_err(line, format!("{what} index {v} out of range (< {bound})")));
    }
    Ok(v)
}

fn strip(e: Error) -> String {
    match e {
        Error::Validation(m) => m,
        other => other.to_string(),
    }
}

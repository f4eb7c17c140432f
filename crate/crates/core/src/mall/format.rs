use std::fmt::Write as _;

use super::{MallInstance, MallInstanceParts, SizeCaps, TypeLimits};
use crate::error::{parse_err, Error, Result};

/// Parses the line-oriented mall instance format.
///
/// ```text
/// MALL <locations> <areas> <types> <groups>
/// A <location> <area>
/// G <type> <group ids...>
/// T <type> <min> <ideal> <max>
/// SZ <max_small> <max_medium> <max_large>
/// F <type> <area> <money>
/// ATT <area> <type> <money>
/// CS <type> <money>
/// SYN <money>
/// ```
///
/// Every location needs an `A` line and every type a `G` line. Missing `T`
/// lines default to `0 0 <locations>`, a missing `SZ` to `<locations>` for
/// each class, and missing money entries to 0.
pub fn parse_mall_instance(text: &str) -> Result<MallInstance> {
    let mut parts: Option<MallInstanceParts> = None;
    let mut area_seen: Vec<bool> = Vec::new();
    let mut group_seen: Vec<bool> = Vec::new();
    let mut limit_seen: Vec<bool> = Vec::new();
    let mut sz_seen = false;
    let mut syn_seen = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let tag = tokens.next().unwrap_or_default();
        let f: Vec<&str> = tokens.collect();

        if tag == "MALL" {
            if parts.is_some() {
                return Err(parse_err(line_no, "duplicate MALL header"));
            }
            arity(line_no, &f, 4, "MALL <locations> <areas> <types> <groups>")?;
            let (locations, areas, types, groups) = (
                num(line_no, f[0])?,
                num(line_no, f[1])?,
                num(line_no, f[2])?,
                num(line_no, f[3])?,
            );
            if areas == 0 || areas > 32 {
                return Err(parse_err(line_no, "area count must be in 1..=32"));
            }
            let mut p = MallInstanceParts::empty(vec![usize::MAX; locations], areas, types, groups);
            p.groups_of = vec![Vec::new(); types];
            parts = Some(p);
            area_seen = vec![false; locations];
            group_seen = vec![false; types];
            limit_seen = vec![false; types];
            continue;
        }
        let p = parts
            .as_mut()
            .ok_or_else(|| parse_err(line_no, "expected MALL header before any record"))?;
        let (locations, areas, types) = (p.area_of.len(), p.area_count, p.type_count);
        match tag {
            "A" => {
                arity(line_no, &f, 2, "A <location> <area>")?;
                let l = index(line_no, f[0], locations, "location")?;
                let a = index(line_no, f[1], areas, "area")?;
                once(line_no, &mut area_seen[l], "A", l)?;
                p.area_of[l] = a;
            }
            "G" => {
                if f.len() < 2 {
                    return Err(parse_err(line_no, "expected G <type> <group ids...>"));
                }
                let t = index(line_no, f[0], types, "type")?;
                once(line_no, &mut group_seen[t], "G", t)?;
                p.groups_of[t] = f[1..]
                    .iter()
                    .map(|g| index(line_no, g, p.group_count, "group"))
                    .collect::<Result<_>>()?;
            }
            "T" => {
                arity(line_no, &f, 4, "T <type> <min> <ideal> <max>")?;
                let t = index(line_no, f[0], types, "type")?;
                once(line_no, &mut limit_seen[t], "T", t)?;
                p.limits[t] = TypeLimits {
                    min: count(line_no, f[1])?,
                    ideal: count(line_no, f[2])?,
                    max: count(line_no, f[3])?,
                };
            }
            "SZ" => {
                arity(line_no, &f, 3, "SZ <max_small> <max_medium> <max_large>")?;
                if sz_seen {
                    return Err(parse_err(line_no, "SZ given twice"));
                }
                sz_seen = true;
                p.caps = SizeCaps {
                    small: count(line_no, f[0])?,
                    medium: count(line_no, f[1])?,
                    large: count(line_no, f[2])?,
                };
            }
            "F" => {
                arity(line_no, &f, 3, "F <type> <area> <money>")?;
                let t = index(line_no, f[0], types, "type")?;
                let a = index(line_no, f[1], areas, "area")?;
                p.fixed_rent[t * areas + a] = money(line_no, f[2])?;
            }
            "ATT" => {
                arity(line_no, &f, 3, "ATT <area> <type> <money>")?;
                let a = index(line_no, f[0], areas, "area")?;
                let t = index(line_no, f[1], types, "type")?;
                p.attractiveness[a * types + t] = money(line_no, f[2])?;
            }
            "CS" => {
                arity(line_no, &f, 2, "CS <type> <money>")?;
                let t = index(line_no, f[0], types, "type")?;
                p.count_slope[t] = money(line_no, f[1])?;
            }
            "SYN" => {
                arity(line_no, &f, 1, "SYN <money>")?;
                if syn_seen {
                    return Err(parse_err(line_no, "SYN given twice"));
                }
                syn_seen = true;
                p.synergy_bonus = money(line_no, f[0])?;
            }
            other => return Err(parse_err(line_no, format!("unknown record tag `{other}`"))),
        }
    }

    let parts = parts.ok_or_else(|| parse_err(1, "missing MALL header"))?;
    if let Some(l) = area_seen.iter().position(|s| !s) {
        return Err(Error::Validation(format!("location {l} has no area")));
    }
    if let Some(t) = group_seen.iter().position(|s| !s) {
        return Err(Error::Validation(format!("type {t} belongs to no group")));
    }
    MallInstance::from_parts(parts)
}

/// Renders an instance so that `parse_mall_instance(render(x)) == x`.
pub fn render_mall_instance(instance: &MallInstance) -> String {
    let p = instance.parts();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "MALL {} {} {} {}",
        p.area_of.len(),
        p.area_count,
        p.type_count,
        p.group_count
    );
    for (l, a) in p.area_of.iter().enumerate() {
        let _ = writeln!(out, "A {l} {a}");
    }
    for (t, groups) in p.groups_of.iter().enumerate() {
        let _ = write!(out, "G {t}");
        for g in groups {
            let _ = write!(out, " {g}");
        }
        out.push('\n');
    }
    for (t, l) in p.limits.iter().enumerate() {
        let _ = writeln!(out, "T {t} {} {} {}", l.min, l.ideal, l.max);
    }
    let _ = writeln!(out, "SZ {} {} {}", p.caps.small, p.caps.medium, p.caps.large);
    for t in 0..p.type_count {
        for a in 0..p.area_count {
            let v = p.fixed_rent[t * p.area_count + a];
            if v != 0.0 {
                let _ = writeln!(out, "F {t} {a} {v}");
            }
        }
    }
    for a in 0..p.area_count {
        for t in 0..p.type_count {
            let v = p.attractiveness[a * p.type_count + t];
            if v != 0.0 {
                let _ = writeln!(out, "ATT {a} {t} {v}");
            }
        }
    }
    for (t, &v) in p.count_slope.iter().enumerate() {
        if v != 0.0 {
            let _ = writeln!(out, "CS {t} {v}");
        }
    }
    if p.synergy_bonus != 0.0 {
        let _ = writeln!(out, "SYN {}", p.synergy_bonus);
    }
    out
}

fn arity(line: usize, fields: &[&str], n: usize, usage: &str) -> Result<()> {
    if fields.len() != n {
        return Err(parse_err(line, format!("expected {usage}")));
    }
    Ok(())
}

fn once(line: usize, seen: &mut bool, tag: &str, id: usize) -> Result<()> {
    if *seen {
        return Err(parse_err(line, format!("{tag} record for {id} given twice")));
    }
    *seen = true;
    Ok(())
}

fn num(line: usize, token: &str) -> Result<usize> {
    token
        .parse::<usize>()
        .map_err(|_| parse_err(line, format!("`{token}` is not a non-negative integer")))
}

fn count(line: usize, token: &str) -> Result<u32> {
    u32::try_from(num(line, token)?).map_err(|_| parse_err(line, format!("`{token}` is too large")))
}

fn index(line: usize, token: &str, bound: usize, what: &str) -> Result<usize> {
    let v = num(line, token)?;
    if v >= bound {
        return Err(parse_err(line, format!("{what} index {v} out of range (< {bound})")));
    }
    Ok(v)
}

fn money(line: usize, token: &str) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| parse_err(line, format!("`{token}` is not a decimal amount")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("`{token}` is not a finite amount")));
    }
    Ok(v)
}

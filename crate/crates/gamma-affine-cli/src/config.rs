//! Line-oriented session configs.
//!
//! A config is a sequence of `[section]` headers and `key = value` lines;
//! `#` starts a comment. Sections:
//!
//! ```text
//! [group]      free-rank = 1        torsion = 2 4
//! [character]  conductor = 2        params = 1       image 0 = -1
//! [algebra]    use = gl_torus 7 1
//!              (or inline: labels = e h f / bracket e f = h /
//!               form e f = 1 / action 0 e = -1*f)
//! [module]     level = 1            depth = 6        modes = 3
//! [suites]     window = 4           run = lie-axioms affine vacuum
//! ```
//!
//! Scalars use the shared grammar: rationals, `z^j` for the conductor root
//! of unity, `q1..qk` for formal units. Term lists (bracket right-hand
//! sides, action columns) are comma-separated `scalar*label` or bare
//! `label` entries.

use std::collections::BTreeMap;

use gamma_affine_core::conformal::ConformalPresentation;
use gamma_affine_core::group::{AbelianGroup, Character};
use gamma_affine_core::lie::{FinitePresentation, Presentation};
use gamma_affine_core::scalars::{parse_scalar, Scalar, UnitMonomial};

use crate::catalogue;

#[derive(Debug)]
pub struct SessionConfig {
    pub name: String,
    pub conductor: u64,
    pub params: usize,
    pub pres: Option<Presentation>,
    pub conformal: Option<ConformalPresentation>,
    pub level: Scalar,
    pub depth: i64,
    pub modes: i64,
    pub window: i64,
    pub suites: Vec<String>,
    /// Non-comment config lines, echoed into reports for reproducibility.
    pub echo: Vec<String>,
}

type Entry = (usize, String, String);

fn split_sections(text: &str) -> Result<(BTreeMap<String, Vec<Entry>>, Vec<String>), Vec<String>> {
    let mut sections: BTreeMap<String, Vec<Entry>> = BTreeMap::new();
    let mut echo = vec![];
    let mut errors = vec![];
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        echo.push(line.to_string());
        if line.starts_with('[') {
            if !line.ends_with(']') {
                errors.push(format!("line {}: unterminated section header", i + 1));
                continue;
            }
            let name = line[1..line.len() - 1].trim().to_string();
            sections.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            errors.push(format!("line {}: expected `key = value`", i + 1));
            continue;
        };
        match &current {
            None => errors.push(format!("line {}: entry before any section", i + 1)),
            Some(sec) => sections.get_mut(sec).unwrap().push((
                i + 1,
                key.trim().to_string(),
                value.trim().to_string(),
            )),
        }
    }
    if errors.is_empty() {
        Ok((sections, echo))
    } else {
        Err(errors)
    }
}

fn get_one<'a>(entries: &'a [Entry], key: &str) -> Option<&'a Entry> {
    entries.iter().find(|(_, k, _)| k == key)
}

fn parse_int(e: &Entry) -> Result<i64, String> {
    e.2.parse::<i64>().map_err(|_| format!("line {}: `{}` is not an integer", e.0, e.2))
}

/// `scalar*label` or bare `label`, comma-separated.
fn parse_terms(
    value: &str,
    line: usize,
    labels: &[String],
    conductor: u64,
    k: usize,
) -> Result<Vec<(usize, Scalar)>, String> {
    let mut out = vec![];
    for part in value.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (coeff, label) = match part.rfind('*') {
            Some(pos) => {
                let c = parse_scalar(&part[..pos], conductor, k)
                    .map_err(|e| format!("line {}: {}", line, e))?;
                (c, part[pos + 1..].trim())
            }
            None => (Scalar::one(k), part),
        };
        let idx = labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| format!("line {}: unknown label `{}`", line, label))?;
        out.push((idx, coeff));
    }
    Ok(out)
}

pub fn parse_config(name: &str, text: &str) -> Result<SessionConfig, Vec<String>> {
    let (sections, echo) = split_sections(text)?;
    let mut errors: Vec<String> = vec![];

    let Some(group_entries) = sections.get("group") else {
        return Err(vec!["missing group section".to_string()]);
    };
    let free_rank = match get_one(group_entries, "free-rank") {
        Some(e) => parse_int(e).unwrap_or_else(|err| {
            errors.push(err);
            0
        }) as usize,
        None => 0,
    };
    let mut torsion = vec![];
    if let Some(e) = get_one(group_entries, "torsion") {
        for tok in e.2.split_whitespace() {
            match tok.parse::<u64>() {
                Ok(d) if d >= 2 => torsion.push(d),
                _ => errors.push(format!("line {}: torsion order `{}` must be >= 2", e.0, tok)),
            }
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    let group = AbelianGroup { free_rank, torsion: torsion.clone() };

    let chr_entries = sections.get("character").cloned().unwrap_or_default();
    let conductor = match get_one(&chr_entries, "conductor") {
        Some(e) => parse_int(e).map_err(|e| vec![e])?.max(1) as u64,
        None => 1,
    };
    let params = match get_one(&chr_entries, "params") {
        Some(e) => parse_int(e).map_err(|e| vec![e])? as usize,
        None => 0,
    };
    let mut images: Vec<Option<UnitMonomial>> = vec![None; group.ngens()];
    for (line, key, value) in &chr_entries {
        let Some(rest) = key.strip_prefix("image") else { continue };
        let idx: usize = rest
            .trim()
            .parse()
            .map_err(|_| vec![format!("line {}: bad generator index in `{}`", line, key)])?;
        if idx >= group.ngens() {
            errors.push(format!("line {}: image index {} out of range", line, idx));
            continue;
        }
        let s = parse_scalar(value, conductor, params)
            .map_err(|e| vec![format!("line {}: {}", line, e)])?;
        match s.as_unit() {
            Some(u) => images[idx] = Some(u),
            None => errors.push(format!(
                "line {}: character image `{}` is not a unit monomial",
                line, value
            )),
        }
    }
    if images.iter().any(|i| i.is_none()) && group.ngens() > 0 {
        errors.push("character must give one image per group generator".to_string());
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    let images: Vec<UnitMonomial> = images.into_iter().flatten().collect();
    // Torsion generators must map to units of compatible order.
    for (i, d) in torsion.iter().enumerate() {
        let img = &images[group.free_rank + i];
        if !img.pow(*d as i64).is_one() {
            errors.push(format!(
                "image of torsion generator {} does not have order dividing {}",
                group.free_rank + i,
                d
            ));
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    let character = Character::new(group.clone(), conductor, params, images.clone())
        .map_err(|e| vec![e])?;

    let mut pres: Option<Presentation> = None;
    let mut conformal: Option<ConformalPresentation> = None;
    if let Some(alg_entries) = sections.get("algebra") {
        if let Some(e) = get_one(alg_entries, "use") {
            let mut toks = e.2.split_whitespace();
            let nm = toks.next().unwrap_or("");
            let mut args = vec![];
            for t in toks {
                args.push(
                    t.parse::<i64>()
                        .map_err(|_| vec![format!("line {}: bad argument `{}`", e.0, t)])?,
                );
            }
            match catalogue::resolve(nm, &args).map_err(|err| vec![format!("line {}: {}", e.0, err)])? {
                catalogue::Resolved::Lie(p) => {
                    let c = p.character();
                    if c.group.free_rank != group.free_rank || c.group.torsion != torsion {
                        errors.push(format!("line {}: group section does not match `{}`", e.0, nm));
                    }
                    if c.conductor != conductor || c.k != params {
                        errors.push(format!(
                            "line {}: character section does not match `{}`",
                            e.0, nm
                        ));
                    } else {
                        for (i, img) in images.iter().enumerate() {
                            if img.to_scalar(params) != c.images[i].to_scalar(params) {
                                errors.push(format!(
                                    "line {}: character image {} does not match `{}`",
                                    e.0, i, nm
                                ));
                            }
                        }
                    }
                    pres = Some(p);
                }
                catalogue::Resolved::Conformal(c) => {
                    if c.character.conductor != conductor || c.character.k != params {
                        errors.push(format!(
                            "line {}: character section does not match `{}`",
                            e.0, nm
                        ));
                    }
                    conformal = Some(c);
                }
            }
        } else {
            // Inline finite presentation over the declared group.
            let labels: Vec<String> = match get_one(alg_entries, "labels") {
                Some(e) => e.2.split_whitespace().map(|s| s.to_string()).collect(),
                None => {
                    return Err(vec!["inline algebra needs a labels entry".to_string()]);
                }
            };
            let nb = labels.len();
            let lab_idx = |name: &str, line: usize| -> Result<usize, Vec<String>> {
                labels
                    .iter()
                    .position(|l| l == name)
                    .ok_or_else(|| vec![format!("line {}: unknown label `{}`", line, name)])
            };
            let mut bracket = BTreeMap::new();
            let mut form = BTreeMap::new();
            let mut action: Vec<Vec<Vec<Scalar>>> =
                vec![vec![vec![Scalar::zero(params); nb]; nb]; group.ngens()];
            let mut action_seen = vec![vec![false; nb]; group.ngens()];
            for (line, key, value) in alg_entries {
                let toks: Vec<&str> = key.split_whitespace().collect();
                match toks.as_slice() {
                    ["labels"] | ["use"] => {}
                    ["bracket", a, b] => {
                        let (i, j) = (lab_idx(a, *line)?, lab_idx(b, *line)?);
                        let terms = parse_terms(value, *line, &labels, conductor, params)
                            .map_err(|e| vec![e])?;
                        bracket.insert((i, j), terms);
                    }
                    ["form", a, b] => {
                        let (i, j) = (lab_idx(a, *line)?, lab_idx(b, *line)?);
                        let s = parse_scalar(value, conductor, params)
                            .map_err(|e| vec![format!("line {}: {}", line, e)])?;
                        form.insert((i, j), s);
                    }
                    ["action", gi, src] => {
                        let g: usize = gi
                            .parse()
                            .map_err(|_| vec![format!("line {}: bad generator `{}`", line, gi)])?;
                        if g >= group.ngens() {
                            return Err(vec![format!(
                                "line {}: action generator {} out of range",
                                line, g
                            )]);
                        }
                        let j = lab_idx(src, *line)?;
                        let terms = parse_terms(value, *line, &labels, conductor, params)
                            .map_err(|e| vec![e])?;
                        for (tgt, c) in terms {
                            action[g][tgt][j] = c;
                        }
                        action_seen[g][j] = true;
                    }
                    _ => errors.push(format!("line {}: unknown algebra entry `{}`", line, key)),
                }
            }
            for (g, seen) in action_seen.iter().enumerate() {
                if seen.iter().any(|s| !s) {
                    errors.push(format!(
                        "action of group generator {} must cover every label",
                        g
                    ));
                }
            }
            if !errors.is_empty() {
                return Err(errors);
            }
            pres = Some(Presentation::Finite(FinitePresentation::new(
                labels,
                character.clone(),
                bracket,
                form,
                action,
            )));
        }
    }
    if pres.is_none() && conformal.is_none() {
        errors.push("missing algebra section".to_string());
    }
    if !errors.is_empty() {
        return Err(errors);
    }

    let mod_entries = sections.get("module").cloned().unwrap_or_default();
    let level = match get_one(&mod_entries, "level") {
        Some(e) => parse_scalar(&e.2, conductor, params)
            .map_err(|err| vec![format!("line {}: {}", e.0, err)])?,
        None => Scalar::one(params),
    };
    let depth = match get_one(&mod_entries, "depth") {
        Some(e) => parse_int(e).map_err(|e| vec![e])?,
        None => 4,
    };
    let modes = match get_one(&mod_entries, "modes") {
        Some(e) => parse_int(e).map_err(|e| vec![e])?,
        None => 3,
    };

    let suite_entries = sections.get("suites").cloned().unwrap_or_default();
    let window = match get_one(&suite_entries, "window") {
        Some(e) => parse_int(e).map_err(|e| vec![e])?,
        None => 3,
    };
    if depth < 0 || modes < 0 || window <= 0 {
        return Err(vec!["depth and modes must be >= 0 and window positive".to_string()]);
    }
    let suites = match get_one(&suite_entries, "run") {
        Some(e) => e.2.split_whitespace().map(|s| s.to_string()).collect(),
        None => {
            if conformal.is_some() {
                vec!["conformal".to_string()]
            } else {
                vec!["lie-axioms".to_string(), "affine".to_string()]
            }
        }
    };

    Ok(SessionConfig {
        name: name.to_string(),
        conductor,
        params,
        pres,
        conformal,
        level,
        depth,
        modes,
        window,
        suites,
        echo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bundled(name: &str) -> String {
        let path = format!("{}/../../configs/{}", env!("CARGO_MANIFEST_DIR"), name);
        std::fs::read_to_string(path).unwrap()
    }

    #[test]
    fn bundled_heisenberg_parses() {
        let cfg = parse_config("heisenberg1", &bundled("heisenberg1.cfg")).unwrap();
        assert_eq!(cfg.conductor, 2);
        assert_eq!(cfg.depth, 6);
        assert_eq!(cfg.window, 4);
        assert!(cfg.pres.is_some());
    }

    #[test]
    fn empty_file_is_missing_group() {
        let err = parse_config("empty", "").unwrap_err();
        assert!(err[0].contains("missing group section"), "{:?}", err);
    }

    #[test]
    fn torsion_image_order_is_validated() {
        let text = "[group]\ntorsion = 2\n[character]\nparams = 1\nimage 0 = q1\n\
                    [algebra]\nlabels = a\nform a a = 1\naction 0 a = a\n";
        let err = parse_config("bad", text).unwrap_err();
        assert!(err.iter().any(|e| e.contains("order dividing")), "{:?}", err);
    }

    #[test]
    fn inline_presentation_builds() {
        let text = "[group]\ntorsion = 2\n[character]\nconductor = 2\nimage 0 = -1\n\
                    [algebra]\nlabels = e h f\nbracket e f = h\nbracket h e = 2*e\n\
                    bracket h f = -2*f\nform e f = 1\nform h h = 2\n\
                    action 0 e = -1*f\naction 0 h = -1*h\naction 0 f = -1*e\n";
        let cfg = parse_config("inline-sl2", text).unwrap();
        let pres = cfg.pres.unwrap();
        assert!(pres.check_axioms().passed());
    }

    #[test]
    fn mismatched_group_is_rejected() {
        let text = "[group]\ntorsion = 3\n[character]\nconductor = 3\nimage 0 = z\n\
                    [algebra]\nuse = heisenberg1\n";
        let err = parse_config("mismatch", text).unwrap_err();
        assert!(err.iter().any(|e| e.contains("does not match")), "{:?}", err);
    }

    #[test]
    fn every_bundled_config_parses() {
        let dir = format!("{}/../../configs", env!("CARGO_MANIFEST_DIR"));
        let mut count = 0;
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.extension().and_then(|e| e.to_str()) != Some("cfg") {
                continue;
            }
            let text = std::fs::read_to_string(&path).unwrap();
            let name = path.file_stem().unwrap().to_string_lossy().into_owned();
            parse_config(&name, &text).unwrap_or_else(|e| panic!("{}: {:?}", name, e));
            count += 1;
        }
        assert!(count >= 7);
    }
}

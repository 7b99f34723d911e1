//! JSON form of proof traces. Sums and words use the term text syntax, rule
//! ids the `R<n>(args)` form printed by [`RuleId::display`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ContextApplication, Direction, ProofStep, ProofTrace, RuleId, Side};
use crate::presentation::{Hom, Presentation};
use crate::terms::{parse_sum, parse_word, FormalSum, Letter, Sign, TermParseError, Word};

#[derive(Debug, Error)]
pub enum TraceFormatError {
    #[error("malformed trace JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field}: {source}")]
    Term {
        field: String,
        source: TermParseError,
    },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct TraceDoc {
    dom: String,
    cod: String,
    start: String,
    end: String,
    steps: Vec<StepDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct StepDoc {
    rule_id: String,
    direction: String,
    sign: i8,
    y: Option<String>,
    z: Option<String>,
    matched_indices: Vec<Option<usize>>,
    after: String,
}

/// Pretty-printed JSON; byte-stable for equal traces.
pub fn trace_to_json(p: &Presentation, trace: &ProofTrace) -> String {
    let doc = TraceDoc {
        dom: p.obj_name(trace.start.dom()).to_string(),
        cod: p.obj_name(trace.start.cod()).to_string(),
        start: trace.start.to_text(p),
        end: trace.end.to_text(p),
        steps: trace
            .steps
            .iter()
            .map(|s| StepDoc {
                rule_id: s.app.rule.to_text(p),
                direction: s.app.direction.as_str().to_string(),
                sign: s.app.sign.as_i64() as i8,
                y: s.app.y.as_ref().map(|w| w.display(p).to_string()),
                z: s.app.z.as_ref().map(|w| w.display(p).to_string()),
                matched_indices: s.matched.clone(),
                after: s.after.to_text(p),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("plain data serializes");
    out.push('\n');
    out
}

pub fn trace_from_json(p: &Presentation, text: &str) -> Result<ProofTrace, TraceFormatError> {
    let doc: TraceDoc = serde_json::from_str(text)?;
    let field_err = |field: &str, message: String| TraceFormatError::Field {
        field: field.to_string(),
        message,
    };
    let obj = |field: &str, name: &str| {
        p.object_id(name)
            .ok_or_else(|| field_err(field, format!("unknown object `{name}`")))
    };
    let dom = obj("dom", &doc.dom)?;
    let cod = obj("cod", &doc.cod)?;
    let sum = |field: &str, text: &str| -> Result<FormalSum, TraceFormatError> {
        let s = parse_sum(p, text).map_err(|source| TraceFormatError::Term {
            field: field.to_string(),
            source,
        })?;
        if (s.dom(), s.cod()) != (dom, cod) {
            return Err(field_err(
                field,
                "sum does not have the trace's type".into(),
            ));
        }
        Ok(s)
    };
    let word = |field: &str, text: &str| -> Result<Word, TraceFormatError> {
        parse_word(p, text).map_err(|source| TraceFormatError::Term {
            field: field.to_string(),
            source,
        })
    };
    let start = sum("start", &doc.start)?;
    let end = sum("end", &doc.end)?;
    let mut steps = Vec::with_capacity(doc.steps.len());
    for (i, s) in doc.steps.iter().enumerate() {
        let f = |name: &str| format!("steps[{i}].{name}");
        let rule = parse_rule_id(p, &s.rule_id).map_err(|m| field_err(&f("ruleId"), m))?;
        let direction = match s.direction.as_str() {
            "lhs->rhs" => Direction::LhsToRhs,
            "rhs->lhs" => Direction::RhsToLhs,
            other => return Err(field_err(&f("direction"), format!("`{other}`"))),
        };
        let sign = match s.sign {
            1 => Sign::Plus,
            -1 => Sign::Minus,
            other => return Err(field_err(&f("sign"), format!("`{other}`"))),
        };
        let y = s.y.as_deref().map(|t| word(&f("y"), t)).transpose()?;
        let z = s.z.as_deref().map(|t| word(&f("z"), t)).transpose()?;
        steps.push(ProofStep {
            app: ContextApplication {
                rule,
                direction,
                sign,
                y,
                z,
            },
            matched: s.matched_indices.clone(),
            after: sum(&f("after"), &s.after)?,
        });
    }
    Ok(ProofTrace { start, end, steps })
}

/// Splits at commas outside parentheses.
fn split_args(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut last = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(s[last..i].trim());
                last = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[last..].trim());
    out
}

fn parse_side(s: &str) -> Result<Side, String> {
    match s {
        "left" => Ok(Side::Left),
        "right" => Ok(Side::Right),
        other => Err(format!("expected left or right, found `{other}`")),
    }
}

pub(crate) fn parse_rule_id(p: &Presentation, text: &str) -> Result<RuleId, String> {
    let text = text.trim();
    let (head, rest) = text
        .split_once('(')
        .ok_or_else(|| format!("malformed rule id `{text}`"))?;
    let inner = rest
        .strip_suffix(')')
        .ok_or_else(|| format!("malformed rule id `{text}`"))?;
    let args = split_args(inner);
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(format!("{head} takes {n} argument(s) in `{text}`"))
        }
    };
    let hom = |s: &str| -> Result<Hom, String> { p.resolve_hom(s).map_err(|e| e.to_string()) };
    match head {
        "R2" => {
            arity(1)?;
            let w = parse_word(p, args[0]).map_err(|e| e.to_string())?;
            Ok(RuleId::Cancel(w))
        }
        "R4" => {
            arity(1)?;
            let o = p
                .object_id(args[0])
                .ok_or_else(|| format!("unknown object `{}`", args[0]))?;
            let s = p
                .sum_of_object(o)
                .ok_or_else(|| format!("`{}` is not a declared sum", args[0]))?;
            Ok(RuleId::Biproduct(s))
        }
        "R5" => {
            arity(2)?;
            Ok(RuleId::Fusion(hom(args[0])?, hom(args[1])?))
        }
        "R6" => {
            arity(2)?;
            let w = parse_word(p, args[1]).map_err(|e| e.to_string())?;
            match w.letters() {
                [q @ (Letter::CornerInv(_) | Letter::Theta(_))] => {
                    Ok(RuleId::Unit(*q, parse_side(args[0])?))
                }
                _ => Err(format!("`{}` is not a synthetic letter", args[1])),
            }
        }
        "R7" => {
            arity(2)?;
            let (a, b) = (hom(args[0])?, hom(args[1])?);
            p.homotopies
                .iter()
                .position(|h| Hom::Gen(h.f0) == a && Hom::Gen(h.f1) == b)
                .map(RuleId::Homotopy)
                .ok_or_else(|| format!("no homotopy {} ~ {}", args[0], args[1]))
        }
        "R8" => {
            arity(2)?;
            let c = p
                .corner_id(args[1])
                .ok_or_else(|| format!("unknown corner `{}`", args[1]))?;
            Ok(RuleId::Stability(c, parse_side(args[0])?))
        }
        "R9" => {
            arity(2)?;
            let s = p
                .split_id(args[1])
                .ok_or_else(|| format!("unknown split exact sequence `{}`", args[1]))?;
            Ok(RuleId::SplitExact(s, parse_side(args[0])?))
        }
        other => Err(format!("unknown rule family `{other}`")),
    }
}

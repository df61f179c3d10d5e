use std::collections::HashMap;

use super::{dx_n, EvolutionSystem, FieldSpec, ModelError};
use crate::kernel::{parse_expression, ExprResolver, Expression, KernelError, Parity, Symbol};

/// Text with a source position for every character.
#[derive(Clone, Debug, Default)]
struct Located {
    text: String,
    pos: Vec<(usize, usize)>,
}

impl Located {
    fn push(&mut self, c: char, at: (usize, usize)) {
        self.text.push(c);
        self.pos.push(at);
    }

    fn push_str(&mut self, s: &str, at: (usize, usize)) {
        for c in s.chars() {
            self.push(c, at);
        }
    }

    fn chars(&self) -> impl Iterator<Item = (char, (usize, usize))> + '_ {
        self.text.chars().zip(self.pos.iter().copied())
    }

    fn slice(&self, from: usize, to: usize) -> Located {
        let chars: Vec<(char, (usize, usize))> = self.chars().collect();
        let mut out = Located::default();
        for (c, p) in &chars[from..to] {
            out.push(*c, *p);
        }
        out
    }

    fn at(&self, idx: usize) -> (usize, usize) {
        self.pos.get(idx).or(self.pos.last()).copied().unwrap_or((1, 1))
    }
}

fn syntax(at: (usize, usize), message: impl Into<String>) -> ModelError {
    ModelError::Syntax { line: at.0, col: at.1, message: message.into() }
}

struct DslResolver<'a> {
    fields: &'a [FieldSpec],
    params: &'a [String],
}

impl ExprResolver for DslResolver<'_> {
    fn ident(&mut self, name: &str) -> Option<Expression> {
        if let Some(f) = self.fields.iter().find(|f| f.name == name) {
            return Some(Expression::symbol(f.jet(0)));
        }
        if self.params.iter().any(|p| p == name) {
            return Some(Expression::symbol(Symbol::param(name)));
        }
        match name {
            "eps12" => Some(Expression::int(1)),
            "eps21" => Some(Expression::int(-1)),
            "eps11" | "eps22" => Some(Expression::zero()),
            _ => None,
        }
    }

    fn derive(&mut self, order: u32, arg: Expression) -> Result<Expression, String> {
        Ok(dx_n(&arg, order))
    }
}

/// Splits `name{1,2}` into `(name, [1, 2])`.
fn template(word: &str) -> Option<(&str, Vec<String>)> {
    let open = word.find('{')?;
    let inner = word[open + 1..].strip_suffix('}')?;
    Some((&word[..open], inner.split(',').map(|s| s.trim().to_string()).collect()))
}

/// Replaces `{letters}` placeholders using `binding`; unbound letters are
/// reported.
fn substitute_indices(src: &Located, binding: &HashMap<char, String>) -> Result<Located, char> {
    let mut out = Located::default();
    let mut it = src.chars().peekable();
    while let Some((c, at)) = it.next() {
        if c != '{' {
            out.push(c, at);
            continue;
        }
        for (d, dat) in it.by_ref() {
            if d == '}' {
                break;
            }
            match binding.get(&d) {
                Some(v) => out.push_str(v, dat),
                None => return Err(d),
            }
        }
    }
    Ok(out)
}

fn index_letters(src: &Located) -> Vec<char> {
    let mut out = Vec::new();
    let mut inside = false;
    for (c, _) in src.chars() {
        match c {
            '{' => inside = true,
            '}' => inside = false,
            c if inside && c.is_ascii_alphabetic() && !out.contains(&c) => out.push(c),
            _ => {}
        }
    }
    out
}

/// Top-level additive terms, each keeping its sign.
fn split_terms(src: &Located) -> Vec<Located> {
    let chars: Vec<char> = src.text.chars().collect();
    let mut cuts = vec![0];
    let mut depth = 0i32;
    let mut prev: Option<char> = None;
    for (i, c) in chars.iter().enumerate() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' if depth == 0 && prev.is_some_and(|p| !"*/^(+-".contains(p)) => cuts.push(i),
            _ => {}
        }
        if !c.is_whitespace() {
            prev = Some(*c);
        }
    }
    cuts.push(chars.len());
    cuts.windows(2).map(|w| src.slice(w[0], w[1])).filter(|t| !t.text.trim().is_empty()).collect()
}

/// Parses the equation text format:
///
/// ```text
/// system skdv
/// param c alpha beta
/// field u parity=even lead=2
/// field xi{1,2} parity=odd lead=2
/// eq u = -d^3(u) + 6*u*d(u) - c*xi{i}*d^2(xi{i})
///     + beta*d(u*w^2)
/// eq xi{i} = -d^3(xi{i}) - c*eps{ij}*d^2(xi{j})*w
/// ```
///
/// Indented lines continue the previous equation. An index in braces that
/// is not fixed by the equation's left side is summed over the declared
/// template values; `eps{ij}` is the antisymmetric symbol with
/// `eps{12} = 1`.
pub fn parse_dsl(text: &str) -> Result<EvolutionSystem, ModelError> {
    let mut name = "system".to_string();
    let mut params: Vec<String> = Vec::new();
    let mut fields: Vec<FieldSpec> = Vec::new();
    let mut index_values: Vec<String> = Vec::new();
    // (lhs word, lhs position, rhs)
    let mut eqs: Vec<(String, (usize, usize), Located)> = Vec::new();

    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        let col0 = content[..indent].chars().count() + 1;
        if indent > 0 {
            let Some(last) = eqs.last_mut() else {
                return Err(syntax((line_no, col0), "continuation line outside an equation"));
            };
            last.2.push(' ', (line_no, col0));
            for (k, c) in content[indent..].chars().enumerate() {
                last.2.push(c, (line_no, col0 + k));
            }
            continue;
        }
        let mut words = content.split_whitespace();
        let head = words.next().unwrap();
        match head {
            "system" => {
                name = words.next().ok_or_else(|| syntax((line_no, 7), "missing system name"))?.to_string();
            }
            "param" => params.extend(words.map(str::to_string)),
            "field" => {
                let word = words.next().ok_or_else(|| syntax((line_no, 6), "missing field name"))?;
                let mut parity = None;
                let mut lead = None;
                for attr in words {
                    let col = raw.find(attr).map_or(1, |b| raw[..b].chars().count() + 1);
                    match attr.split_once('=') {
                        Some(("parity", "even")) => parity = Some(Parity::Even),
                        Some(("parity", "odd")) => parity = Some(Parity::Odd),
                        Some(("lead", v)) => {
                            lead = Some(v.parse::<i32>().map_err(|_| syntax((line_no, col), format!("bad lead `{v}`")))?)
                        }
                        _ => return Err(syntax((line_no, col), format!("unknown field attribute `{attr}`"))),
                    }
                }
                let parity = parity.ok_or_else(|| syntax((line_no, 1), "field needs parity=even|odd"))?;
                let lead = lead.ok_or_else(|| syntax((line_no, 1), "field needs lead=<int>"))?;
                match template(word) {
                    Some((base, values)) => {
                        if index_values.is_empty() {
                            index_values = values.clone();
                        }
                        for v in values {
                            fields.push(FieldSpec::new(&format!("{base}{v}"), parity, lead));
                        }
                    }
                    None => fields.push(FieldSpec::new(word, parity, lead)),
                }
            }
            "eq" => {
                let body = content[2..].trim_start();
                let body_col = content.len() - body.len();
                let Some((lhs, rhs)) = body.split_once('=') else {
                    return Err(syntax((line_no, body_col + 1), "expected `<field> = <expression>`"));
                };
                let rhs_off = body_col + lhs.len() + 1;
                let mut loc = Located::default();
                for (k, c) in rhs.chars().enumerate() {
                    loc.push(c, (line_no, raw[..rhs_off].chars().count() + k + 1));
                }
                eqs.push((lhs.trim().to_string(), (line_no, body_col + 1), loc));
            }
            other => return Err(syntax((line_no, 1), format!("unknown directive `{other}`"))),
        }
    }
    if index_values.is_empty() {
        index_values = vec!["1".into(), "2".into()];
    }

    let mut sys = EvolutionSystem::new(&name, &[], fields.clone());
    sys.params = params.clone();
    let mut resolver = DslResolver { fields: &fields, params: &params };
    for (lhs, at, rhs) in eqs {
        let targets: Vec<(String, HashMap<char, String>)> = match template(&lhs) {
            Some((base, letters)) => {
                let letter = letters.first().and_then(|l| l.chars().next()).filter(|_| letters.len() == 1);
                let Some(letter) = letter else {
                    return Err(syntax(at, "equation templates take a single index letter"));
                };
                index_values
                    .iter()
                    .map(|v| (format!("{base}{v}"), HashMap::from([(letter, v.clone())])))
                    .collect()
            }
            None => vec![(lhs.clone(), HashMap::new())],
        };
        for (field, bound) in targets {
            if sys.field_index(&field).is_none() {
                return Err(syntax(at, format!("equation for unknown field `{field}`")));
            }
            let mut total = Expression::zero();
            for term in split_terms(&rhs) {
                let free: Vec<char> = index_letters(&term).into_iter().filter(|c| !bound.contains_key(c)).collect();
                let mut combos: Vec<HashMap<char, String>> = vec![bound.clone()];
                for letter in free {
                    combos = combos
                        .into_iter()
                        .flat_map(|b| {
                            index_values.iter().map(move |v| {
                                let mut b = b.clone();
                                b.insert(letter, v.clone());
                                b
                            })
                        })
                        .collect();
                }
                for b in combos {
                    let expanded = substitute_indices(&term, &b).map_err(|c| syntax(term.at(0), format!("unbound index `{c}`")))?;
                    let e = parse_expression(&expanded.text, &mut resolver, None).map_err(|e| match e {
                        KernelError::Parse { col, message, .. } => {
                            let p = expanded.at(col.saturating_sub(1));
                            syntax(p, message)
                        }
                        other => ModelError::Kernel(other),
                    })?;
                    total.add_assign_ref(&e);
                }
            }
            sys.set_equation(&field, total).map_err(|e| match e {
                ModelError::EquationParity(f) => syntax(at, format!("equation for `{f}` has the wrong parity")),
                other => other,
            })?;
        }
    }
    Ok(sys)
}

/// Writes a system in the text format read by [`parse_dsl`]; one term per
/// line, in a deterministic order.
pub fn emit_dsl(sys: &EvolutionSystem) -> String {
    let mut out = format!("system {}\n", sys.name);
    if !sys.params.is_empty() {
        out.push_str(&format!("param {}\n", sys.params.join(" ")));
    }
    for f in &sys.fields {
        out.push_str(&format!("field {} parity={} lead={}\n", f.name, f.parity, f.lead));
    }
    for (f, eq) in sys.fields.iter().zip(&sys.equations) {
        let Some(eq) = eq else { continue };
        let mut terms: Vec<String> = eq.terms().map(|(m, c)| Expression::term(c.clone(), m.clone()).render()).collect();
        terms.sort();
        out.push_str(&format!("eq {} =", f.name));
        if terms.is_empty() {
            out.push_str(" 0\n");
            continue;
        }
        for (i, t) in terms.iter().enumerate() {
            let (sign, body) = match t.strip_prefix('-') {
                Some(b) => ("-", b),
                None => ("+", t.as_str()),
            };
            if i == 0 {
                out.push_str(&format!(" {}{}\n", if sign == "-" { "-" } else { "" }, body));
            } else {
                out.push_str(&format!("    {sign} {body}\n"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_osp22, build_skdv};

    #[test]
    fn emit_parse_round_trip() {
        for sys in [build_skdv(None, None, None), build_osp22()] {
            let text = emit_dsl(&sys);
            let back = parse_dsl(&text).unwrap();
            assert_eq!(back.fields, sys.fields);
            assert_eq!(back.equations, sys.equations, "{text}");
        }
    }

    #[test]
    fn index_templates_and_eps() {
        let text = "param a\nfield w parity=even lead=1\nfield xi{1,2} parity=odd lead=2\n\
                    eq xi{i} = a*eps{ij}*xi{j}*w\n";
        let sys = parse_dsl(text).unwrap();
        let w = Expression::symbol(Symbol::jet("w", 0, Parity::Even));
        let a = Expression::symbol(Symbol::param("a"));
        let xi2 = Expression::symbol(Symbol::jet("xi2", 0, Parity::Odd));
        assert_eq!(sys.equation("xi1").unwrap(), &(&(&a * &xi2) * &w));
        assert!(sys.equation("w").is_none());
    }

    #[test]
    fn errors_carry_line_and_column() {
        let text = "field u parity=even lead=2\neq u = -d^3(u)\n    + 6*u*d(v)\n";
        match parse_dsl(text) {
            Err(ModelError::Syntax { line, col, .. }) => assert_eq!((line, col), (3, 13)),
            other => panic!("{other:?}"),
        }
        match parse_dsl("field u parity=strange lead=2\n") {
            Err(ModelError::Syntax { line: 1, col: 9, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_dsl("bogus\n"), Err(ModelError::Syntax { line: 1, .. })));
    }
}

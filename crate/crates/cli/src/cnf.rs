//! DIMACS CNF input. Assignment `x` sets variable `i` to bit `i - 1` of `x`.

use std::fs;
use std::path::Path;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    pub vars: u32,
    pub clauses: Vec<Vec<i32>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CnfHeader {
    pub vars: u32,
    pub clauses: usize,
}

fn parse_err(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Parse { line, msg: msg.into() }
}

fn parse_header(line_no: usize, line: &str) -> Result<CnfHeader, CliError> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != "p" || toks[1] != "cnf" {
        return Err(parse_err(line_no, format!("expected `p cnf <vars> <clauses>`, found `{line}`")));
    }
    let vars = toks[2].parse().map_err(|_| parse_err(line_no, format!("bad variable count `{}`", toks[2])))?;
    let clauses = toks[3].parse().map_err(|_| parse_err(line_no, format!("bad clause count `{}`", toks[3])))?;
    Ok(CnfHeader { vars, clauses })
}

fn is_comment(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('c') || t.starts_with('%')
}

/// Reads only up to the problem line.
pub fn read_header(path: &Path) -> Result<CnfHeader, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    for (i, line) in text.lines().enumerate() {
        if is_comment(line) {
            continue;
        }
        return parse_header(i + 1, line.trim());
    }
    Err(parse_err(1, "missing `p cnf` header"))
}

pub fn parse_cnf_str(text: &str) -> Result<Cnf, CliError> {
    let mut header: Option<CnfHeader> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    let mut last_line = 1;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        if is_comment(line) {
            continue;
        }
        let Some(h) = header else {
            header = Some(parse_header(line_no, line.trim())?);
            continue;
        };
        for tok in line.split_whitespace() {
            let lit: i32 = tok.parse().map_err(|_| parse_err(line_no, format!("bad literal `{tok}`")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() > h.vars {
                    return Err(parse_err(line_no, format!("literal {lit} exceeds {} variables", h.vars)));
                }
                current.push(lit);
            }
        }
    }
    let Some(h) = header else {
        return Err(parse_err(1, "missing `p cnf` header"));
    };
    if !current.is_empty() {
        return Err(parse_err(last_line, "last clause is not terminated by 0"));
    }
    if clauses.len() != h.clauses {
        return Err(parse_err(last_line, format!("header declares {} clauses, found {}", h.clauses, clauses.len())));
    }
    Ok(Cnf { vars: h.vars, clauses })
}

pub fn parse_cnf(path: &Path) -> Result<Cnf, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_cnf_str(&text)
}

impl Cnf {
    /// Energy bound: clause count plus one.
    pub fn levels(&self) -> u32 {
        self.clauses.len() as u32 + 1
    }

    pub fn violated(&self, x: usize) -> u32 {
        let sat = |lit: i32| {
            let bit = (x >> (lit.unsigned_abs() - 1)) & 1 == 1;
            if lit > 0 {
                bit
            } else {
                !bit
            }
        };
        self.clauses.iter().filter(|c| !c.iter().any(|&l| sat(l))).count() as u32
    }

    /// Violated-clause count for every assignment.
    pub fn energies(&self) -> Vec<u32> {
        (0..1usize << self.vars).map(|x| self.violated(x)).collect()
    }
}

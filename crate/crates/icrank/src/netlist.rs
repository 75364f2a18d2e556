//! Gate-level netlists: `.bench` and structural-Verilog parsing, fan-out
//! profiles, stage (level) maps, and invariant checking.
//!
//! Primary inputs are modeled as driver pseudo-cells so that every net has
//! exactly one driver. Primary outputs are net attributes; reading a net at an
//! output pad counts as one extra sink when output taps are enabled, since a
//! pulse must physically reach the pad.

use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CellKind {
    Input,
    And,
    Nand,
    Or,
    Nor,
    Xor,
    Xnor,
    Not,
    Buf,
    Dff,
}

impl CellKind {
    pub fn parse(s: &str) -> Option<CellKind> {
        match s.to_ascii_uppercase().as_str() {
            "AND" => Some(CellKind::And),
            "NAND" => Some(CellKind::Nand),
            "OR" => Some(CellKind::Or),
            "NOR" => Some(CellKind::Nor),
            "XOR" => Some(CellKind::Xor),
            "XNOR" => Some(CellKind::Xnor),
            "NOT" | "INV" => Some(CellKind::Not),
            "BUF" | "BUFF" => Some(CellKind::Buf),
            "DFF" => Some(CellKind::Dff),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CellKind::Input => "INPUT",
            CellKind::And => "AND",
            CellKind::Nand => "NAND",
            CellKind::Or => "OR",
            CellKind::Nor => "NOR",
            CellKind::Xor => "XOR",
            CellKind::Xnor => "XNOR",
            CellKind::Not => "NOT",
            CellKind::Buf => "BUF",
            CellKind::Dff => "DFF",
        }
    }

    /// Every logic cell is clocked in fully-synchronous SFQ; input pseudo-cells
    /// are not clock sinks.
    pub fn is_clocked(self) -> bool {
        self != CellKind::Input
    }
}

impl std::fmt::Display for CellKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub id: String,
    pub kind: CellKind,
    pub inputs: Vec<String>,
    pub output: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Net {
    /// Index of the driving cell in `Netlist::cells`.
    pub driver: usize,
    /// Indices of cells with an input pin on this net (with multiplicity).
    pub sinks: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Netlist {
    pub name: String,
    cells: Vec<Cell>,
    nets: BTreeMap<String, Net>,
    pub primary_inputs: Vec<String>,
    pub primary_outputs: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("{file}:{line}: syntax error: {msg}")]
    Syntax {
        file: String,
        line: usize,
        msg: String,
    },
    #[error("{file}:{line}: unknown gate kind '{kind}'")]
    UnknownGate {
        file: String,
        line: usize,
        kind: String,
    },
    #[error("{file}:{line}: unsupported construct '{construct}' (structural primitives only)")]
    Unsupported {
        file: String,
        line: usize,
        construct: String,
    },
    #[error("{file}:{line}: net '{net}' already has a driver")]
    DuplicateDriver {
        file: String,
        line: usize,
        net: String,
    },
    #[error("{file}: net '{net}' is referenced but never driven")]
    UndrivenNet { file: String, net: String },
    #[error("{file}: netlist is invalid: {0:?}", .violations)]
    Invalid {
        file: String,
        violations: Vec<Violation>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum NetlistError {
    #[error("combinational cycle through cells: {}", .cycle.join(" -> "))]
    Cycle { cycle: Vec<String> },
    #[error("unknown cell '{0}'")]
    UnknownCell(String),
}

/// A netlist-invariant violation. Violations are data, not errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    MultipleDrivers { net: String, drivers: Vec<String> },
    UndrivenNet { net: String, sink: String },
    UndrivenOutput { net: String },
    DuplicateCellId { id: String },
    Cycle { cycle: Vec<String> },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::MultipleDrivers { net, drivers } => {
                write!(f, "multiple drivers: {} ({})", net, drivers.join(", "))
            }
            Violation::UndrivenNet { net, sink } => {
                write!(f, "undriven net: {net} (read by {sink})")
            }
            Violation::UndrivenOutput { net } => write!(f, "undriven primary output: {net}"),
            Violation::DuplicateCellId { id } => write!(f, "duplicate cell id: {id}"),
            Violation::Cycle { cycle } => write!(f, "combinational cycle: {}", cycle.join(" -> ")),
        }
    }
}

/// Fan-out count per net plus the histogram over all nets.
#[derive(Debug, Clone, Serialize)]
pub struct FanoutProfile {
    pub per_net: BTreeMap<String, u32>,
    pub histogram: BTreeMap<u32, u32>,
    pub max_fanout: u32,
}

/// Longest-path stage per logic cell (stage 1 = fed by primary inputs only).
#[derive(Debug, Clone, Serialize)]
pub struct StageMap {
    pub per_cell: BTreeMap<String, u32>,
    /// Clocked-cell count per stage.
    pub stage_sizes: BTreeMap<u32, u32>,
}

impl StageMap {
    pub fn depth(&self) -> u32 {
        self.stage_sizes.keys().max().copied().unwrap_or(0)
    }

    pub fn total_clocked(&self) -> u32 {
        self.stage_sizes.values().sum()
    }
}

impl Netlist {
    /// Assemble and validate a netlist from parts. Primary inputs become
    /// `Input` pseudo-cells if not already present.
    pub fn new(
        name: impl Into<String>,
        mut cells: Vec<Cell>,
        primary_inputs: Vec<String>,
        primary_outputs: Vec<String>,
    ) -> Result<Self, Vec<Violation>> {
        let mut full = Vec::with_capacity(cells.len() + primary_inputs.len());
        for pi in &primary_inputs {
            full.push(Cell {
                id: pi.clone(),
                kind: CellKind::Input,
                inputs: Vec::new(),
                output: pi.clone(),
            });
        }
        full.append(&mut cells);
        let netlist = Self::assemble(name.into(), full, primary_inputs, primary_outputs)?;
        let violations = netlist.validate();
        if violations.is_empty() {
            Ok(netlist)
        } else {
            Err(violations)
        }
    }

    fn assemble(
        name: String,
        cells: Vec<Cell>,
        primary_inputs: Vec<String>,
        primary_outputs: Vec<String>,
    ) -> Result<Self, Vec<Violation>> {
        let mut nets: BTreeMap<String, Net> = BTreeMap::new();
        let mut violations = Vec::new();
        let mut seen_ids = BTreeSet::new();
        for (idx, cell) in cells.iter().enumerate() {
            if !seen_ids.insert(cell.id.clone()) {
                violations.push(Violation::DuplicateCellId {
                    id: cell.id.clone(),
                });
            }
            match nets.entry(cell.output.clone()) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(Net {
                        driver: idx,
                        sinks: Vec::new(),
                    });
                }
                std::collections::btree_map::Entry::Occupied(e) => {
                    violations.push(Violation::MultipleDrivers {
                        net: cell.output.clone(),
                        drivers: vec![cells[e.get().driver].id.clone(), cell.id.clone()],
                    });
                }
            }
        }
        let mut undriven_seen = BTreeSet::new();
        for (idx, cell) in cells.iter().enumerate() {
            for input in &cell.inputs {
                match nets.get_mut(input) {
                    Some(net) => net.sinks.push(idx),
                    None => {
                        if undriven_seen.insert(input.clone()) {
                            violations.push(Violation::UndrivenNet {
                                net: input.clone(),
                                sink: cell.id.clone(),
                            });
                        }
                    }
                }
            }
        }
        for po in &primary_outputs {
            if !nets.contains_key(po) {
                violations.push(Violation::UndrivenOutput { net: po.clone() });
            }
        }
        if !violations.is_empty() {
            return Err(violations);
        }
        Ok(Netlist {
            name,
            cells,
            nets,
            primary_inputs,
            primary_outputs,
        })
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Logic cells only (primary-input pseudo-cells skipped).
    pub fn logic_cells(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| c.kind != CellKind::Input)
    }

    pub fn num_logic_cells(&self) -> u32 {
        self.logic_cells().count() as u32
    }

    pub fn cell(&self, id: &str) -> Option<&Cell> {
        self.cells.iter().find(|c| c.id == id)
    }

    pub fn nets(&self) -> &BTreeMap<String, Net> {
        &self.nets
    }

    pub fn driver_of(&self, net: &str) -> Option<&Cell> {
        self.nets.get(net).map(|n| &self.cells[n.driver])
    }

    pub fn sinks_of(&self, net: &str) -> Vec<&Cell> {
        self.nets
            .get(net)
            .map(|n| n.sinks.iter().map(|&i| &self.cells[i]).collect())
            .unwrap_or_default()
    }

    pub fn is_primary_output(&self, net: &str) -> bool {
        self.primary_outputs.iter().any(|n| n == net)
    }

    /// Fan-out of one net: input pins reading it, plus its output tap.
    pub fn net_fanout(&self, net: &str, count_output_taps: bool) -> u32 {
        let sinks = self
            .nets
            .get(net)
            .map(|n| n.sinks.len() as u32)
            .unwrap_or(0);
        let tap = if count_output_taps && self.is_primary_output(net) {
            1
        } else {
            0
        };
        sinks + tap
    }

    /// Per-net fan-out counts and the histogram over all nets.
    pub fn fanout_profile(&self, count_output_taps: bool) -> FanoutProfile {
        let mut per_net = BTreeMap::new();
        let mut histogram: BTreeMap<u32, u32> = BTreeMap::new();
        let mut max_fanout = 0;
        for name in self.nets.keys() {
            let fo = self.net_fanout(name, count_output_taps);
            per_net.insert(name.clone(), fo);
            *histogram.entry(fo).or_default() += 1;
            max_fanout = max_fanout.max(fo);
        }
        FanoutProfile {
            per_net,
            histogram,
            max_fanout,
        }
    }

    /// Longest-path stage per logic cell. Stage 1 holds cells fed only by
    /// primary inputs; every edge goes from a lower to a higher stage.
    pub fn levelize(&self) -> Result<StageMap, NetlistError> {
        let n = self.cells.len();
        let mut indegree = vec![0u32; n];
        let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
        for net in self.nets.values() {
            for &sink in &net.sinks {
                succs[net.driver].push(sink);
                indegree[sink] += 1;
            }
        }
        let mut stage = vec![0u32; n];
        let mut queue: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut visited = 0usize;
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            visited += 1;
            for &v in &succs[u] {
                let cand = stage[u] + 1;
                if cand > stage[v] {
                    stage[v] = cand;
                }
                indegree[v] -= 1;
                if indegree[v] == 0 {
                    queue.push(v);
                }
            }
        }
        if visited != n {
            return Err(NetlistError::Cycle {
                cycle: self.extract_cycle(&indegree),
            });
        }
        let mut per_cell = BTreeMap::new();
        let mut stage_sizes: BTreeMap<u32, u32> = BTreeMap::new();
        for (i, cell) in self.cells.iter().enumerate() {
            if cell.kind == CellKind::Input {
                continue;
            }
            per_cell.insert(cell.id.clone(), stage[i]);
            if cell.kind.is_clocked() {
                *stage_sizes.entry(stage[i]).or_default() += 1;
            }
        }
        Ok(StageMap {
            per_cell,
            stage_sizes,
        })
    }

    fn extract_cycle(&self, indegree: &[u32]) -> Vec<String> {
        // Walk forward through still-cyclic cells until one repeats.
        let in_cycle: Vec<usize> = (0..self.cells.len()).filter(|&i| indegree[i] > 0).collect();
        let Some(&start) = in_cycle.first() else {
            return Vec::new();
        };
        let mut path = vec![start];
        let mut seen = BTreeSet::from([start]);
        let mut cur = start;
        loop {
            let next = self
                .nets
                .get(&self.cells[cur].output)
                .and_then(|n| n.sinks.iter().find(|s| indegree[**s] > 0))
                .copied();
            match next {
                Some(v) if seen.contains(&v) => {
                    let pos = path.iter().position(|&p| p == v).unwrap_or(0);
                    return path[pos..]
                        .iter()
                        .map(|&i| self.cells[i].id.clone())
                        .collect();
                }
                Some(v) => {
                    seen.insert(v);
                    path.push(v);
                    cur = v;
                }
                None => return path.iter().map(|&i| self.cells[i].id.clone()).collect(),
            }
        }
    }

    /// Check all netlist invariants. Empty result means the netlist is valid.
    pub fn validate(&self) -> Vec<Violation> {
        // Structural violations are rejected at assembly; re-derive the
        // remaining global ones here so hand-built netlists can be audited.
        let mut violations = Vec::new();
        for po in &self.primary_outputs {
            if !self.nets.contains_key(po) {
                violations.push(Violation::UndrivenOutput { net: po.clone() });
            }
        }
        if let Err(NetlistError::Cycle { cycle }) = self.levelize() {
            violations.push(Violation::Cycle { cycle });
        }
        violations
    }

    /// Logic-cell count per kind.
    pub fn kind_counts(&self) -> BTreeMap<CellKind, u32> {
        let mut counts = BTreeMap::new();
        for cell in self.logic_cells() {
            *counts.entry(cell.kind).or_default() += 1;
        }
        counts
    }
}

/// Parse ISCAS-style `.bench` text: `INPUT(x)`, `OUTPUT(x)`,
/// `x = GATE(a, b, …)`, `#` comments.
pub fn parse_bench(text: &str, name: &str) -> Result<Netlist, ParseError> {
    let file = name.to_string();
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    let mut cells: Vec<Cell> = Vec::new();
    let mut driven: BTreeSet<String> = BTreeSet::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let stmt = raw
            .split('#')
            .next()
            .unwrap_or("")
            .trim()
            .trim_end_matches('\r');
        if stmt.is_empty() {
            continue;
        }
        if let Some(rest) = strip_call(stmt, "INPUT") {
            let net = rest.trim().to_string();
            if net.is_empty() {
                return Err(ParseError::Syntax {
                    file,
                    line,
                    msg: "empty INPUT()".into(),
                });
            }
            if !driven.insert(net.clone()) {
                return Err(ParseError::DuplicateDriver { file, line, net });
            }
            inputs.push(net);
            continue;
        }
        if let Some(rest) = strip_call(stmt, "OUTPUT") {
            outputs.push(rest.trim().to_string());
            continue;
        }
        let Some((lhs, rhs)) = stmt.split_once('=') else {
            return Err(ParseError::Syntax {
                file,
                line,
                msg: format!("expected INPUT/OUTPUT/assignment, got '{stmt}'"),
            });
        };
        let out = lhs.trim().to_string();
        let rhs = rhs.trim();
        let Some(open) = rhs.find('(') else {
            return Err(ParseError::Syntax {
                file,
                line,
                msg: format!("expected GATE(...), got '{rhs}'"),
            });
        };
        if !rhs.ends_with(')') {
            return Err(ParseError::Syntax {
                file,
                line,
                msg: "missing closing ')'".into(),
            });
        }
        let kind_str = rhs[..open].trim();
        let Some(kind) = CellKind::parse(kind_str) else {
            return Err(ParseError::UnknownGate {
                file,
                line,
                kind: kind_str.to_string(),
            });
        };
        let args: Vec<String> = rhs[open + 1..rhs.len() - 1]
            .split(',')
            .map(|a| a.trim().to_string())
            .filter(|a| !a.is_empty())
            .collect();
        if args.is_empty() {
            return Err(ParseError::Syntax {
                file,
                line,
                msg: format!("gate '{out}' has no inputs"),
            });
        }
        if !driven.insert(out.clone()) {
            return Err(ParseError::DuplicateDriver {
                file,
                line,
                net: out,
            });
        }
        cells.push(Cell {
            id: out.clone(),
            kind,
            inputs: args,
            output: out,
        });
    }

    finish_parse(file, name, cells, inputs, outputs)
}

fn strip_call<'a>(stmt: &'a str, keyword: &str) -> Option<&'a str> {
    let rest = stmt.strip_prefix(keyword)?.trim_start();
    rest.strip_prefix('(')?.strip_suffix(')')
}

/// Parse a structural-Verilog subset: one module, `input`/`output`/`wire`
/// declarations and positional primitive instantiations
/// (`and`/`or`/`nand`/`nor`/`xor`/`xnor`/`not`/`buf`/`dff`, output port first).
pub fn parse_verilog_subset(text: &str, name: &str) -> Result<Netlist, ParseError> {
    let file = name.to_string();
    let stripped = strip_verilog_comments(text);
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    let mut cells: Vec<Cell> = Vec::new();
    let mut module_name: Option<String> = None;
    let mut ended = false;

    let mut pos = 0usize;
    let bytes = stripped.as_bytes();
    while pos < stripped.len() {
        // statements are ';'-terminated except endmodule
        let rest = stripped[pos..].trim_start();
        let offset = stripped.len() - pos - rest.len();
        pos += offset;
        if rest.is_empty() {
            break;
        }
        let line = 1 + stripped[..pos].matches('\n').count();
        if rest.starts_with("endmodule") {
            ended = true;
            pos += "endmodule".len();
            continue;
        }
        let Some(end) = stripped[pos..].find(';') else {
            return Err(ParseError::Syntax {
                file,
                line,
                msg: "unterminated statement (missing ';')".into(),
            });
        };
        let stmt = stripped[pos..pos + end].trim().replace(['\n', '\r'], " ");
        pos += end + 1;
        if stmt.is_empty() {
            continue;
        }
        if ended {
            return Err(ParseError::Unsupported {
                file,
                line,
                construct: "text after endmodule".into(),
            });
        }
        let keyword = stmt.split_whitespace().next().unwrap_or("").to_string();
        match keyword.as_str() {
            "module" => {
                if module_name.is_some() {
                    return Err(ParseError::Unsupported {
                        file,
                        line,
                        construct: "second module".into(),
                    });
                }
                let rest = stmt["module".len()..].trim();
                let name_end = rest.find('(').unwrap_or(rest.len());
                module_name = Some(rest[..name_end].trim().to_string());
            }
            "input" | "output" | "wire" => {
                let rest = stmt[keyword.len()..].trim();
                if rest.contains('[') {
                    return Err(ParseError::Unsupported {
                        file,
                        line,
                        construct: "vector declaration".into(),
                    });
                }
                let names = rest.split(',').map(|s| s.trim().to_string());
                match keyword.as_str() {
                    "input" => inputs.extend(names.filter(|s| !s.is_empty())),
                    "output" => outputs.extend(names.filter(|s| !s.is_empty())),
                    _ => {} // wires are implied by use
                }
            }
            "assign" | "always" | "initial" | "reg" | "parameter" | "specify" | "function" => {
                return Err(ParseError::Unsupported {
                    file,
                    line,
                    construct: keyword,
                });
            }
            _ => {
                let Some(open) = stmt.find('(') else {
                    return Err(ParseError::Syntax {
                        file,
                        line,
                        msg: format!("expected instantiation, got '{stmt}'"),
                    });
                };
                if !stmt.ends_with(')') {
                    return Err(ParseError::Syntax {
                        file,
                        line,
                        msg: "missing closing ')'".into(),
                    });
                }
                let head: Vec<&str> = stmt[..open].split_whitespace().collect();
                let (prim, inst) = match head.as_slice() {
                    [p, i] => (*p, (*i).to_string()),
                    [p] => (*p, format!("{}_{}", p, cells.len())),
                    _ => {
                        return Err(ParseError::Syntax {
                            file,
                            line,
                            msg: format!("bad instantiation head '{}'", stmt[..open].trim()),
                        })
                    }
                };
                if prim.contains('#') {
                    return Err(ParseError::Unsupported {
                        file,
                        line,
                        construct: "parameterized instance".into(),
                    });
                }
                let Some(kind) = CellKind::parse(prim) else {
                    return Err(ParseError::UnknownGate {
                        file,
                        line,
                        kind: prim.to_string(),
                    });
                };
                let ports: Vec<String> = stmt[open + 1..stmt.len() - 1]
                    .split(',')
                    .map(|p| p.trim().to_string())
                    .collect();
                if ports.iter().any(|p| p.starts_with('.')) {
                    return Err(ParseError::Unsupported {
                        file,
                        line,
                        construct: "named port connection".into(),
                    });
                }
                if ports.len() < 2 || ports.iter().any(|p| p.is_empty()) {
                    return Err(ParseError::Syntax {
                        file,
                        line,
                        msg: format!("instance '{inst}' needs an output and at least one input"),
                    });
                }
                cells.push(Cell {
                    id: inst,
                    kind,
                    inputs: ports[1..].to_vec(),
                    output: ports[0].clone(),
                });
            }
        }
    }
    let _ = bytes;
    if module_name.is_none() {
        return Err(ParseError::Syntax {
            file,
            line: 1,
            msg: "no module found".into(),
        });
    }

    let display_name = if name.is_empty() {
        module_name.unwrap_or_default()
    } else {
        name.to_string()
    };
    finish_parse(file, &display_name, cells, inputs, outputs)
}

fn strip_verilog_comments(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c == '/' {
            match text[i + 1..].chars().next() {
                Some('/') => {
                    for (_, c2) in chars.by_ref() {
                        if c2 == '\n' {
                            out.push('\n');
                            break;
                        }
                    }
                    continue;
                }
                Some('*') => {
                    chars.next();
                    let mut prev = ' ';
                    for (_, c2) in chars.by_ref() {
                        if prev == '*' && c2 == '/' {
                            break;
                        }
                        if c2 == '\n' {
                            out.push('\n');
                        }
                        prev = c2;
                    }
                    continue;
                }
                _ => {}
            }
        }
        out.push(c);
    }
    out
}

fn finish_parse(
    file: String,
    name: &str,
    cells: Vec<Cell>,
    inputs: Vec<String>,
    outputs: Vec<String>,
) -> Result<Netlist, ParseError> {
    match Netlist::new(name, cells, inputs, outputs) {
        Ok(netlist) => Ok(netlist),
        Err(violations) => {
            // Single undriven-net violations get the dedicated error shape.
            if let Some(Violation::UndrivenNet { net, .. }) = violations
                .iter()
                .find(|v| matches!(v, Violation::UndrivenNet { .. }))
            {
                if violations.len() == 1 {
                    return Err(ParseError::UndrivenNet {
                        file,
                        net: net.clone(),
                    });
                }
            }
            Err(ParseError::Invalid { file, violations })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const C17_BENCH: &str = include_str!("../data/netlists/c17.bench");
    pub const C17_VERILOG: &str = include_str!("../data/netlists/c17.v");

    #[test]
    fn parse_c17_bench() {
        let n = parse_bench(C17_BENCH, "c17").unwrap();
        assert_eq!(n.primary_inputs.len(), 5);
        assert_eq!(n.primary_outputs.len(), 2);
        assert_eq!(n.num_logic_cells(), 6);
        assert!(n.logic_cells().all(|c| c.kind == CellKind::Nand));
        assert!(n.validate().is_empty());
    }

    #[test]
    fn c17_fanout_profile() {
        let n = parse_bench(C17_BENCH, "c17").unwrap();
        let profile = n.fanout_profile(true);
        assert_eq!(profile.max_fanout, 2);
        // Independent sink count on the published benchmark: nets 3, 11 and 16
        // each feed two gates, everything else is FO1.
        let forked: Vec<&String> = profile
            .per_net
            .iter()
            .filter(|(_, fo)| **fo == 2)
            .map(|(net, _)| net)
            .collect();
        assert_eq!(forked, ["N11", "N16", "N3"]);
        assert_eq!(profile.histogram.get(&2), Some(&3));
        // Independent identity: total fan-out = input pins + output taps.
        let pins: u32 = n.logic_cells().map(|c| c.inputs.len() as u32).sum();
        let total: u32 = profile.per_net.values().sum();
        assert_eq!(total, pins + n.primary_outputs.len() as u32);
    }

    #[test]
    fn c17_levelize_matches_bruteforce() {
        let n = parse_bench(C17_BENCH, "c17").unwrap();
        let stages = n.levelize().unwrap();
        // Brute-force longest path on the 6-gate circuit.
        fn depth(n: &Netlist, id: &str) -> u32 {
            let cell = n.cell(id).unwrap();
            if cell.kind == CellKind::Input {
                return 0;
            }
            1 + cell
                .inputs
                .iter()
                .map(|net| depth(n, &n.driver_of(net).unwrap().id.clone()))
                .max()
                .unwrap()
        }
        for (id, stage) in &stages.per_cell {
            assert_eq!(*stage, depth(&n, id), "cell {id}");
        }
        assert_eq!(stages.depth(), 3);
    }

    #[test]
    fn buffer_chain_stages() {
        let n = parse_bench(
            "INPUT(a)\nOUTPUT(d)\nb = BUF(a)\nc = BUF(b)\nd = BUF(c)\n",
            "chain3",
        )
        .unwrap();
        let stages = n.levelize().unwrap();
        assert_eq!(stages.per_cell["b"], 1);
        assert_eq!(stages.per_cell["c"], 2);
        assert_eq!(stages.per_cell["d"], 3);
        assert!(stages.stage_sizes.values().all(|&c| c == 1));
    }

    #[test]
    fn minimal_buffer_netlist() {
        let n = parse_bench("INPUT(a)\nOUTPUT(b)\nb = BUF(a)\n", "buf").unwrap();
        assert_eq!(n.num_logic_cells(), 1);
        let profile = n.fanout_profile(true);
        assert!(profile.per_net.values().all(|&f| f == 1));
    }

    #[test]
    fn undriven_net_error() {
        let err = parse_bench("OUTPUT(x)\nx = AND(a, a)\n", "bad").unwrap_err();
        assert!(matches!(err, ParseError::UndrivenNet { net, .. } if net == "a"));
    }

    #[test]
    fn duplicate_driver_error() {
        let err = parse_bench("INPUT(a)\nx = BUF(a)\nx = NOT(a)\n", "bad").unwrap_err();
        assert!(matches!(err, ParseError::DuplicateDriver { net, .. } if net == "x"));
    }

    #[test]
    fn unknown_gate_error() {
        let err = parse_bench("INPUT(a)\nx = FROB(a)\n", "bad").unwrap_err();
        assert!(matches!(err, ParseError::UnknownGate { kind, .. } if kind == "FROB"));
    }

    #[test]
    fn crlf_and_comments_tolerated() {
        let text = "# header\r\nINPUT(a)\r\n\r\nOUTPUT(b)\r\nb = BUF(a) # trailing\r\n";
        let n = parse_bench(text, "crlf").unwrap();
        assert_eq!(n.num_logic_cells(), 1);
    }

    #[test]
    fn statement_order_insensitive() {
        let a = parse_bench("INPUT(a)\nOUTPUT(c)\nb = NOT(a)\nc = BUF(b)\n", "m").unwrap();
        let b = parse_bench("c = BUF(b)\nb = NOT(a)\nOUTPUT(c)\nINPUT(a)\n", "m").unwrap();
        assert_eq!(
            a.fanout_profile(true).per_net,
            b.fanout_profile(true).per_net
        );
        assert_eq!(
            a.levelize().unwrap().per_cell,
            b.levelize().unwrap().per_cell
        );
    }

    #[test]
    fn parse_minimal_verilog() {
        let n = parse_verilog_subset(
            "module m(a,b); input a; output b; buf g(b,a); endmodule",
            "m",
        )
        .unwrap();
        assert_eq!(n.num_logic_cells(), 1);
        assert_eq!(n.logic_cells().next().unwrap().kind, CellKind::Buf);
    }

    #[test]
    fn verilog_rejects_assign() {
        let err = parse_verilog_subset(
            "module m(a,b,x); input a, b; output x; assign x = a & b; endmodule",
            "m",
        )
        .unwrap_err();
        assert!(matches!(err, ParseError::Unsupported { construct, .. } if construct == "assign"));
    }

    #[test]
    fn verilog_bench_cross_format_equivalence() {
        let from_bench = parse_bench(C17_BENCH, "c17").unwrap();
        let from_verilog = parse_verilog_subset(C17_VERILOG, "c17").unwrap();
        assert_eq!(
            from_bench.fanout_profile(true).per_net,
            from_verilog.fanout_profile(true).per_net
        );
        assert_eq!(
            from_bench.levelize().unwrap().stage_sizes,
            from_verilog.levelize().unwrap().stage_sizes
        );
        assert_eq!(from_bench.kind_counts(), from_verilog.kind_counts());
    }

    #[test]
    fn hand_built_violations() {
        let cells = vec![
            Cell {
                id: "g1".into(),
                kind: CellKind::Buf,
                inputs: vec!["a".into()],
                output: "x".into(),
            },
            Cell {
                id: "g2".into(),
                kind: CellKind::Not,
                inputs: vec!["a".into()],
                output: "x".into(),
            },
        ];
        let violations = Netlist::new("dup", cells, vec!["a".into()], vec![]).unwrap_err();
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::MultipleDrivers { net, .. } if net == "x")));
    }

    #[test]
    fn cycle_detected() {
        // a -> b -> a through two gates
        let cells = vec![
            Cell {
                id: "g1".into(),
                kind: CellKind::Not,
                inputs: vec!["b".into()],
                output: "a".into(),
            },
            Cell {
                id: "g2".into(),
                kind: CellKind::Not,
                inputs: vec!["a".into()],
                output: "b".into(),
            },
        ];
        let netlist = Netlist::assemble("cyc".into(), cells, vec![], vec![]).unwrap();
        let violations = netlist.validate();
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::Cycle { cycle } if cycle.len() == 2)));
        assert!(netlist.levelize().is_err());
    }
}

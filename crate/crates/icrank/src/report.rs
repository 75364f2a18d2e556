//! Report generation: connection-rule tables, per-netlist analyses, and
//! corpus-level benchmark tables in CSV, markdown, or JSON. All renderings are
//! deterministic: same inputs, same bytes.

use crate::chain::{AmplifierPolicy, ConnectionRule};
use crate::config::{ReportFormat, RunConfig};
use crate::cost::{clock_tree_cost, net_split_cost, savings_pct, total_cost, CostReport};
use crate::ladder::RankLadder;
use crate::netlist::{parse_bench, parse_verilog_subset, Netlist, ParseError};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Render the N×N connection-rule table.
pub fn render_rule_table(
    ladder: &RankLadder,
    table: &[Vec<ConnectionRule>],
    format: ReportFormat,
) -> String {
    let n = table.len();
    let cell = |rule: &ConnectionRule| match rule {
        ConnectionRule::FanoutPositive { max_fanout } => format!("FO{max_fanout}"),
        ConnectionRule::NeedsAmplification { num_jtls } => format!("{num_jtls} JTL"),
    };
    match format {
        ReportFormat::Json => {
            #[derive(Serialize)]
            struct Row<'a> {
                source_rank: u32,
                source_ua: u32,
                rules: Vec<&'a ConnectionRule>,
            }
            let rows: Vec<Row> = table
                .iter()
                .enumerate()
                .map(|(i, row)| Row {
                    source_rank: i as u32 + 1,
                    source_ua: ladder.currents()[i],
                    rules: row.iter().collect(),
                })
                .collect();
            serde_json::to_string_pretty(&rows).expect("serializable") + "\n"
        }
        ReportFormat::Csv => {
            let mut out = String::from("source_rank,source_ua");
            for t in 1..=n {
                out.push_str(&format!(",to_r{t}"));
            }
            out.push('\n');
            for (i, row) in table.iter().enumerate() {
                out.push_str(&format!("{},{}", i + 1, ladder.currents()[i]));
                for rule in row {
                    out.push(',');
                    out.push_str(&cell(rule));
                }
                out.push('\n');
            }
            out
        }
        ReportFormat::Md => {
            let width = 7usize;
            let mut out = String::new();
            out.push_str(&format!("| {:<10} |", "src \\ tgt"));
            for t in 1..=n {
                out.push_str(&format!(" {:>width$} |", format!("R{t}")));
            }
            out.push('\n');
            out.push_str(&format!("|{:-<12}|", ""));
            for _ in 0..n {
                out.push_str(&format!("{:-<width$}--|", ""));
            }
            out.push('\n');
            for (i, row) in table.iter().enumerate() {
                out.push_str(&format!(
                    "| {:<10} |",
                    format!("R{} {}uA", i + 1, ladder.currents()[i])
                ));
                for rule in row {
                    out.push_str(&format!(" {:>width$} |", cell(rule)));
                }
                out.push('\n');
            }
            out
        }
    }
}

/// One corpus benchmark: JJ counts and savings for data splitting (both
/// amplification step sizes), clock distribution, and the whole netlist.
#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkRow {
    pub name: String,
    pub gates: u32,
    pub nets: u32,
    pub max_fanout: u32,
    pub data_conv_jj: u64,
    pub data_sqrt2_jj: u64,
    pub data_step2_jj: u64,
    pub data_sqrt2_savings_pct: f64,
    pub data_step2_savings_pct: f64,
    pub clock_conv_jj: u64,
    pub clock_ranked_jj: u64,
    pub clock_savings_pct: f64,
    pub total_conv_jj: u64,
    pub total_ranked_jj: u64,
    pub total_savings_pct: f64,
}

/// Analyze one parsed netlist into a benchmark row.
pub fn benchmark_row(netlist: &Netlist, config: &RunConfig) -> crate::Result<BenchmarkRow> {
    let ladder = config.ladder()?;
    let sqrt2 = AmplifierPolicy {
        intra_step_ranks: 1,
        ..config.policy()
    };
    let step2 = AmplifierPolicy {
        intra_step_ranks: 2,
        ..config.policy()
    };
    let profile = netlist.fanout_profile(config.count_output_taps);

    let mut data_conv = 0u64;
    let mut data_sqrt2 = 0u64;
    let mut data_step2 = 0u64;
    for &fo in profile.per_net.values() {
        if fo >= 2 {
            data_conv += net_split_cost(fo, &ladder, &sqrt2)?.jj_conventional;
            data_sqrt2 += crate::cost::ranked_split_jjs(fo, &ladder, &sqrt2);
            data_step2 += crate::cost::ranked_split_jjs(fo, &ladder, &step2);
        }
    }

    let stages = netlist.levelize().map_err(crate::Error::Netlist)?;
    let converters = if config.clock_input_converters {
        netlist.primary_inputs.len() as u32
    } else {
        0
    };
    let clock = clock_tree_cost(
        &stages,
        &ladder,
        &sqrt2,
        config.clock_mode,
        config.clock_arity,
        converters,
    )?;
    let lib = config.cell_library()?;
    let total = total_cost(netlist, &lib, &ladder, &sqrt2, &config.cost_options())?;

    Ok(BenchmarkRow {
        name: netlist.name.clone(),
        gates: netlist.num_logic_cells(),
        nets: netlist.nets().len() as u32,
        max_fanout: profile.max_fanout,
        data_conv_jj: data_conv,
        data_sqrt2_jj: data_sqrt2,
        data_step2_jj: data_step2,
        data_sqrt2_savings_pct: savings_pct(data_conv, data_sqrt2),
        data_step2_savings_pct: savings_pct(data_conv, data_step2),
        clock_conv_jj: clock.jj_conventional,
        clock_ranked_jj: clock.jj_ranked,
        clock_savings_pct: clock.savings_pct,
        total_conv_jj: total.jj_conventional,
        total_ranked_jj: total.jj_ranked,
        total_savings_pct: total.savings_pct,
    })
}

/// Parse a netlist file by extension (`.bench` or `.v`).
pub fn parse_netlist_file(path: &Path) -> Result<Netlist, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|e| ParseError::Syntax {
        file: path.display().to_string(),
        line: 0,
        msg: e.to_string(),
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| path.display().to_string());
    let file = path.display().to_string();
    if path.extension().is_some_and(|e| e == "v") {
        parse_verilog_subset(&text, &name).map_err(|e| rename_file(e, &file))
    } else {
        parse_bench(&text, &name).map_err(|e| rename_file(e, &file))
    }
}

fn rename_file(err: ParseError, file: &str) -> ParseError {
    // Parsers tag errors with the netlist name; swap in the full path.
    match err {
        ParseError::Syntax { line, msg, .. } => ParseError::Syntax {
            file: file.into(),
            line,
            msg,
        },
        ParseError::UnknownGate { line, kind, .. } => ParseError::UnknownGate {
            file: file.into(),
            line,
            kind,
        },
        ParseError::Unsupported {
            line, construct, ..
        } => ParseError::Unsupported {
            file: file.into(),
            line,
            construct,
        },
        ParseError::DuplicateDriver { line, net, .. } => ParseError::DuplicateDriver {
            file: file.into(),
            line,
            net,
        },
        ParseError::UndrivenNet { net, .. } => ParseError::UndrivenNet {
            file: file.into(),
            net,
        },
        ParseError::Invalid { violations, .. } => ParseError::Invalid {
            file: file.into(),
            violations,
        },
    }
}

/// Corpus run outcome: rows for every parseable file, errors for the rest.
pub struct CorpusOutcome {
    pub rows: Vec<BenchmarkRow>,
    pub failures: Vec<(PathBuf, ParseError)>,
}

/// Run every `.bench`/`.v` file in a directory, lexicographically.
pub fn run_corpus(dir: &Path, config: &RunConfig) -> crate::Result<CorpusOutcome> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| {
            crate::Error::Config(crate::config::ConfigError::Io {
                path: dir.to_path_buf(),
                source: e,
            })
        })?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "bench" || e == "v"))
        .collect();
    files.sort();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for file in files {
        match parse_netlist_file(&file) {
            Ok(netlist) => rows.push(benchmark_row(&netlist, config)?),
            Err(e) => failures.push((file, e)),
        }
    }
    Ok(CorpusOutcome { rows, failures })
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut count) = (0.0, 0u32);
    for v in values {
        sum += v;
        count += 1;
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Per-column arithmetic means of the savings percentages.
pub fn corpus_averages(rows: &[BenchmarkRow]) -> BTreeMap<String, f64> {
    BTreeMap::from([
        (
            "data_sqrt2_savings_pct".to_string(),
            mean(rows.iter().map(|r| r.data_sqrt2_savings_pct)),
        ),
        (
            "data_step2_savings_pct".to_string(),
            mean(rows.iter().map(|r| r.data_step2_savings_pct)),
        ),
        (
            "clock_savings_pct".to_string(),
            mean(rows.iter().map(|r| r.clock_savings_pct)),
        ),
        (
            "total_savings_pct".to_string(),
            mean(rows.iter().map(|r| r.total_savings_pct)),
        ),
    ])
}

/// Render the corpus table with a trailing Average row.
pub fn render_bench_table(rows: &[BenchmarkRow], format: ReportFormat, lib_label: &str) -> String {
    let avg = corpus_averages(rows);
    match format {
        ReportFormat::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                cell_library: &'a str,
                rows: &'a [BenchmarkRow],
                average: &'a BTreeMap<String, f64>,
            }
            serde_json::to_string_pretty(&Out {
                cell_library: lib_label,
                rows,
                average: &avg,
            })
            .expect("serializable")
                + "\n"
        }
        ReportFormat::Csv => {
            let mut out = String::from(
                "benchmark,gates,nets,max_fanout,\
                 data_conv_jj,data_sqrt2_jj,data_step2_jj,\
                 data_sqrt2_savings_pct,data_step2_savings_pct,\
                 clock_conv_jj,clock_ranked_jj,clock_savings_pct,\
                 total_conv_jj,total_ranked_jj,total_savings_pct\n",
            );
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{:.1},{:.1},{},{},{:.1},{},{},{:.1}\n",
                    r.name,
                    r.gates,
                    r.nets,
                    r.max_fanout,
                    r.data_conv_jj,
                    r.data_sqrt2_jj,
                    r.data_step2_jj,
                    r.data_sqrt2_savings_pct,
                    r.data_step2_savings_pct,
                    r.clock_conv_jj,
                    r.clock_ranked_jj,
                    r.clock_savings_pct,
                    r.total_conv_jj,
                    r.total_ranked_jj,
                    r.total_savings_pct
                ));
            }
            out.push_str(&format!(
                "Average,,,,,,,{:.1},{:.1},,,{:.1},,,{:.1}\n",
                avg["data_sqrt2_savings_pct"],
                avg["data_step2_savings_pct"],
                avg["clock_savings_pct"],
                avg["total_savings_pct"]
            ));
            out
        }
        ReportFormat::Md => {
            let mut out = String::new();
            out.push_str(&format!("cell library: {lib_label}\n\n"));
            out.push_str(
                "| Benchmark | Data savings (pa=sqrt2) | Data savings (pa=2) | Clock savings | Total savings |\n",
            );
            out.push_str("|-----------|------------------------:|--------------------:|--------------:|--------------:|\n");
            for r in rows {
                out.push_str(&format!(
                    "| {} | {:.1}% | {:.1}% | {:.1}% | {:.1}% |\n",
                    r.name,
                    r.data_sqrt2_savings_pct,
                    r.data_step2_savings_pct,
                    r.clock_savings_pct,
                    r.total_savings_pct
                ));
            }
            out.push_str(&format!(
                "| Average | {:.1}% | {:.1}% | {:.1}% | {:.1}% |\n",
                avg["data_sqrt2_savings_pct"],
                avg["data_step2_savings_pct"],
                avg["clock_savings_pct"],
                avg["total_savings_pct"]
            ));
            out
        }
    }
}

/// Full single-netlist report: fan-out histogram, stage map, cost reports.
#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    pub name: String,
    pub gates: u32,
    pub primary_inputs: u32,
    pub primary_outputs: u32,
    pub fanout_histogram: BTreeMap<u32, u32>,
    pub max_fanout: u32,
    pub stage_sizes: BTreeMap<u32, u32>,
    pub depth: u32,
    pub data: CostReport,
    pub data_step2: CostReport,
    pub clock: CostReport,
    pub total: CostReport,
}

pub fn analyze_netlist(netlist: &Netlist, config: &RunConfig) -> crate::Result<AnalyzeReport> {
    let ladder = config.ladder()?;
    let base = config.policy();
    let sqrt2 = AmplifierPolicy {
        intra_step_ranks: 1,
        ..base
    };
    let step2 = AmplifierPolicy {
        intra_step_ranks: 2,
        ..base
    };
    let profile = netlist.fanout_profile(config.count_output_taps);
    let stages = netlist.levelize().map_err(crate::Error::Netlist)?;

    let data_pair = |policy: &AmplifierPolicy| -> crate::Result<CostReport> {
        let mut conv = 0;
        let mut ranked = 0;
        for &fo in profile.per_net.values() {
            if fo >= 2 {
                conv += 3 * (fo as u64 - 1);
                ranked += crate::cost::ranked_split_jjs(fo, &ladder, policy);
            }
        }
        let mut report = CostReport::new(conv, ranked);
        report
            .breakdown
            .insert("data_splitting".into(), (conv, ranked));
        Ok(report)
    };

    let lib = config.cell_library()?;
    Ok(AnalyzeReport {
        name: netlist.name.clone(),
        gates: netlist.num_logic_cells(),
        primary_inputs: netlist.primary_inputs.len() as u32,
        primary_outputs: netlist.primary_outputs.len() as u32,
        fanout_histogram: profile.histogram.clone(),
        max_fanout: profile.max_fanout,
        stage_sizes: stages.stage_sizes.clone(),
        depth: stages.depth(),
        data: data_pair(&sqrt2)?,
        data_step2: data_pair(&step2)?,
        clock: clock_tree_cost(
            &stages,
            &ladder,
            &sqrt2,
            config.clock_mode,
            config.clock_arity,
            if config.clock_input_converters {
                netlist.primary_inputs.len() as u32
            } else {
                0
            },
        )?,
        total: total_cost(netlist, &lib, &ladder, &base, &config.cost_options())?,
    })
}

pub fn render_analyze(report: &AnalyzeReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => serde_json::to_string_pretty(report).expect("serializable") + "\n",
        ReportFormat::Csv => {
            let mut out = String::from("benchmark,category,conv_jj,ranked_jj,savings_pct\n");
            let mut line = |cat: &str, c: &CostReport| {
                out.push_str(&format!(
                    "{},{},{},{},{:.1}\n",
                    report.name, cat, c.jj_conventional, c.jj_ranked, c.savings_pct
                ));
            };
            line("data_splitting", &report.data);
            line("data_splitting_step2", &report.data_step2);
            line("clock", &report.clock);
            line("total", &report.total);
            out
        }
        ReportFormat::Md => {
            let mut out = String::new();
            out.push_str(&format!("# {}\n\n", report.name));
            out.push_str(&format!(
                "gates {} | inputs {} | outputs {} | depth {} | max fan-out {}\n\n",
                report.gates,
                report.primary_inputs,
                report.primary_outputs,
                report.depth,
                report.max_fanout
            ));
            out.push_str("fan-out histogram: ");
            let hist: Vec<String> = report
                .fanout_histogram
                .iter()
                .map(|(fo, n)| format!("FO{fo}x{n}"))
                .collect();
            out.push_str(&hist.join(" "));
            out.push_str("\n\nstages: ");
            let st: Vec<String> = report
                .stage_sizes
                .iter()
                .map(|(s, n)| format!("{s}:{n}"))
                .collect();
            out.push_str(&st.join(" "));
            out.push_str("\n\n| category | conventional JJ | ranked JJ | savings |\n");
            out.push_str("|----------|----------------:|----------:|--------:|\n");
            for (cat, c) in [
                ("data splitting (pa=sqrt2)", &report.data),
                ("data splitting (pa=2)", &report.data_step2),
                ("clock", &report.clock),
                ("total", &report.total),
            ] {
                out.push_str(&format!(
                    "| {} | {} | {} | {:.1}% |\n",
                    cat, c.jj_conventional, c.jj_ranked, c.savings_pct
                ));
            }
            if let Some(label) = report.total.details.get("cell_library") {
                out.push_str(&format!("\ncell library: {label}\n"));
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::connection_rule_table;

    #[test]
    fn rule_table_renderings_are_deterministic() {
        let config = RunConfig::default();
        let ladder = config.ladder().unwrap();
        let table = connection_rule_table(&ladder, &config.policy());
        for format in [ReportFormat::Csv, ReportFormat::Md, ReportFormat::Json] {
            let a = render_rule_table(&ladder, &table, format);
            let b = render_rule_table(&ladder, &table, format);
            assert_eq!(a, b);
        }
        let md = render_rule_table(&ladder, &table, ReportFormat::Md);
        assert!(md.contains("FO4"));
        let csv = render_rule_table(&ladder, &table, ReportFormat::Csv);
        assert!(csv.lines().count() == 9);
    }

    #[test]
    fn c17_row_savings() {
        let netlist = parse_bench(include_str!("../data/netlists/c17.bench"), "c17").unwrap();
        let row = benchmark_row(&netlist, &RunConfig::default()).unwrap();
        assert!((row.data_sqrt2_savings_pct - 33.3).abs() < 0.1);
        assert!((row.data_step2_savings_pct - 33.3).abs() < 0.1);
        assert_eq!(row.max_fanout, 2);
        // Percentages recompute from the raw counts in the same row.
        assert!(
            (row.data_sqrt2_savings_pct - savings_pct(row.data_conv_jj, row.data_sqrt2_jj)).abs()
                < 1e-12
        );
    }

    #[test]
    fn bench_table_has_average_row() {
        let netlist = parse_bench(include_str!("../data/netlists/c17.bench"), "c17").unwrap();
        let rows = vec![benchmark_row(&netlist, &RunConfig::default()).unwrap()];
        let md = render_bench_table(&rows, ReportFormat::Md, "test");
        assert!(md.contains("| Average |"));
        let csv = render_bench_table(&rows, ReportFormat::Csv, "test");
        assert!(csv.lines().last().unwrap().starts_with("Average"));
    }
}

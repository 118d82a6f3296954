use std::fs;
use std::path::{Path, PathBuf};

use rdcann::archsearch::search;
use rdcann::data::generate_synthetic_with;
use rdcann::parametric::scatter_csv;
use rdcann::{
    load_csv, scatter_export, sweep as run_sweep, train as run_train, write_csv, Column, Model,
    MetricsReport, Network, NormalizationSpec, SurrogateRanges, SweepSpec, TrainConfig,
};

use crate::config::{FileConfig, Resolver};
use crate::{ArchSearchArgs, CliError, EvaluateArgs, GenDataArgs, PredictArgs, SweepArgs, TrainArgs, TrainingFlags};

const DEFAULT_SPLIT: f64 = 0.8;
const DEFAULT_HIDDEN: usize = 7;
const DEFAULT_MIN_HIDDEN: usize = 2;
const DEFAULT_MAX_HIDDEN: usize = 12;

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn display_path(p: &Path) -> String {
    p.display().to_string()
}

pub fn gen_data(args: &GenDataArgs, file: &FileConfig) -> Result<(), CliError> {
    let mut r = Resolver::new(file);
    let n: u64 = r.required("n", args.n)?;
    if n == 0 {
        return Err(CliError::usage("`n` must be >= 1"));
    }
    let seed = r.value("seed", args.seed, 0)?;
    let noise = r.value("noise", args.noise, 0.0)?;
    let out: String = r.required("out", args.out.as_deref().map(display_path))?;
    let d = SurrogateRanges::default();
    let ranges = SurrogateRanges {
        sf_ratio: r.range("range_sf_ratio", d.sf_ratio)?,
        feed_temp: r.range("range_feed_temp", d.feed_temp)?,
        solvent_temp: r.range("range_solvent_temp", d.solvent_temp)?,
        rotation: r.range("range_rotation", d.rotation)?,
    };
    eprint!("{}", r.echo());

    let ds = generate_synthetic_with(n as usize, seed, noise, &ranges)?;
    write_csv(&ds, &out)?;
    eprintln!("wrote {} samples to {out}", ds.len());
    Ok(())
}

struct Training {
    data: PathBuf,
    config: TrainConfig,
    split: f64,
    split_seed: u64,
}

fn resolve_training(flags: &TrainingFlags, r: &mut Resolver) -> Result<Training, CliError> {
    let defaults = TrainConfig::default();
    let data: String = r.required("data", flags.data.as_deref().map(display_path))?;
    let iterations = r.value("iterations", flags.iterations, defaults.iterations)?;
    let learning_rate = r.value("lr", flags.lr, defaults.learning_rate)?;
    let momentum = r.value("momentum", flags.momentum, defaults.momentum)?;
    let seed = r.value("seed", flags.seed, defaults.seed)?;
    let split = r.value("split", flags.split, DEFAULT_SPLIT)?;
    let split_seed = r.value("split_seed", flags.split_seed, seed)?;
    let config = TrainConfig {
        learning_rate,
        momentum,
        iterations,
        seed,
        history_stride: (iterations / 1000).max(1),
        ..defaults
    };
    config.validate()?;
    Ok(Training {
        data: PathBuf::from(data),
        config,
        split,
        split_seed,
    })
}

pub fn train(args: &TrainArgs, file: &FileConfig) -> Result<(), CliError> {
    let mut r = Resolver::new(file);
    let t = resolve_training(&args.common, &mut r)?;
    let hidden = r.value("hidden", args.hidden, DEFAULT_HIDDEN)?;
    let model_out: String = r.required("model_out", args.model_out.as_deref().map(display_path))?;
    let history_out: Option<String> = r.optional("history_out", args.history_out.as_deref().map(display_path))?;
    eprint!("{}", r.echo());

    let ds = load_csv(&t.data)?;
    let (train_ds, val_ds) = ds.split(t.split, t.split_seed)?;
    let norm = NormalizationSpec::fit(&train_ds)?;
    let set = norm.normalize(&train_ds)?;
    let net = Network::init(4, hidden, 1, t.config.seed)?;
    let (net, history) = run_train(net, &set, &t.config)?;
    let model = Model::new(net, norm, train_ds.input_means()?)?;

    let train_report = model.evaluate(&train_ds)?.report()?;
    let val_report = model.evaluate(&val_ds)?.report()?;
    model.save(&model_out)?;
    if let Some(path) = history_out {
        write_file(Path::new(&path), &history.to_csv())?;
    }

    println!("model = {model_out}");
    println!("dims = 4 {hidden} 1");
    println!("train_rows = {}", train_ds.len());
    println!("validation_rows = {}", val_ds.len());
    print!("{}", train_report.to_text("train"));
    print!("{}", val_report.to_text("validation"));
    Ok(())
}

pub fn arch_search(args: &ArchSearchArgs, file: &FileConfig) -> Result<(), CliError> {
    let mut r = Resolver::new(file);
    let t = resolve_training(&args.common, &mut r)?;
    let lo = r.value("min_hidden", args.min_hidden, DEFAULT_MIN_HIDDEN)?;
    let hi = r.value("max_hidden", args.max_hidden, DEFAULT_MAX_HIDDEN)?;
    let out: Option<String> = r.optional("out", args.out.as_deref().map(display_path))?;
    eprint!("{}", r.echo());
    if lo == 0 || lo > hi {
        return Err(CliError::usage(format!("invalid hidden range {lo}..{hi}")));
    }

    let ds = load_csv(&t.data)?;
    let candidates: Vec<usize> = (lo..=hi).collect();
    let report = search(&ds, &candidates, &t.config, t.split, t.split_seed)?;
    if let Some(path) = out {
        write_file(Path::new(&path), &report.to_csv())?;
    }
    if args.csv {
        print!("{}", report.to_csv());
    } else {
        print!("{}", report.to_table());
    }
    Ok(())
}

pub fn evaluate(args: &EvaluateArgs) -> Result<(), CliError> {
    let model = Model::load(&args.model)?;
    let ds = load_csv(&args.data)?;
    let report = model.evaluate(&ds)?.report()?;
    if let Some(path) = &args.scatter_out {
        let pairs = scatter_export(&model, &ds)?;
        write_file(path, &scatter_csv(&pairs))?;
        eprintln!("wrote {} pairs to {}", pairs.len(), path.display());
    }
    if args.csv {
        println!("{}", MetricsReport::CSV_HEADER);
        println!("{}", report.to_csv_row("evaluation"));
    } else {
        print!("{}", report.to_text("evaluation"));
    }
    Ok(())
}

/// Parses `key=value,...` into input slots, rejecting unknown or repeated keys.
fn parse_assignments(text: &str) -> Result<[Option<f64>; 4], CliError> {
    let mut slots = [None; 4];
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("expected key=value, found `{part}`")))?;
        let column: Column = key
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("unknown input `{}`; expected one of {}", key.trim(), input_names())))?;
        if !column.is_input() {
            return Err(CliError::usage(format!("`{column}` is not an input")));
        }
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("`{key}`: not a number: `{value}`")))?;
        let slot = &mut slots[column.index()];
        if slot.is_some() {
            return Err(CliError::usage(format!("`{column}` given twice")));
        }
        *slot = Some(v);
    }
    Ok(slots)
}

fn input_names() -> String {
    Column::INPUTS.map(|c| c.short_name()).join(", ")
}

pub fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let variable: Column = args.var.parse()?;
    let model = Model::load(&args.model)?;
    let mut baseline = model.input_means();
    if let Some(text) = &args.baseline {
        for (slot, v) in baseline.iter_mut().zip(parse_assignments(text)?) {
            if let Some(v) = v {
                *slot = v;
            }
        }
    }
    let spec = SweepSpec::linspace(variable, args.from, args.to, args.steps, baseline)?;
    let result = run_sweep(&model, &spec)?;
    if result.any_extrapolated() {
        eprintln!("warning: some sweep points lie outside the training range");
    }
    let csv = result.to_csv();
    match &args.out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    eprintln!(
        "trend: {}, violations: {}",
        result.trend.direction,
        result.trend.violation_count()
    );
    Ok(())
}

pub fn predict(args: &PredictArgs) -> Result<(), CliError> {
    let slots = parse_assignments(&args.input)?;
    let missing: Vec<&str> = Column::INPUTS
        .iter()
        .filter(|c| slots[c.index()].is_none())
        .map(|c| c.short_name())
        .collect();
    if !missing.is_empty() {
        return Err(CliError::usage(format!(
            "missing input(s) {}; required keys: {}",
            missing.join(", "),
            input_names()
        )));
    }
    let inputs = slots.map(|v| v.expect("checked above"));
    let model = Model::load(&args.model)?;
    let flow = model.predict(&inputs)?;
    if !flow.is_finite() {
        return Err(CliError {
            code: crate::EXIT_NUMERIC,
            message: "prediction is not finite".into(),
        });
    }
    println!("{flow}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assignments_accept_short_and_csv_names() {
        let s = parse_assignments("sf_ratio=2, feed_temp_c=80,rotation=30").unwrap();
        assert_eq!(s, [Some(2.0), Some(80.0), None, Some(30.0)]);
    }

    #[test]
    fn assignments_reject_bad_input() {
        assert!(parse_assignments("sf_ratio=2,sf_ratio=3").is_err());
        assert!(parse_assignments("pressure=2").is_err());
        assert!(parse_assignments("sf_ratio").is_err());
        assert!(parse_assignments("product_flow=2").is_err());
        assert!(parse_assignments("rotation=fast").is_err());
    }
}

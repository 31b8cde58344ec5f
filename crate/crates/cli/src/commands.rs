use std::fs;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use repairforge::format::{
    bytes_to_stripes, spec_sha256, stripes_to_bytes, ReportSet, Shard, SpecFile,
};
use repairforge::pipelines::PermPolicy;
use repairforge::simulate::simulate_repair_all;
use repairforge::transform::{cyclic_perms, default_perms, identity_perms};
use repairforge::{
    algorithm1, algorithm2, apply_transform, cauchy_binary_mds, evenodd, mdr1_6_4,
    Algorithm1Options, Algorithm2Options, BitVector, Codeword, MdsVerdict, RepairReport,
    TransformConfig, Variant,
};
use serde_json::json;

use crate::error::{CliError, Result};
use crate::store::{load_spec, read_shards, shard_path, write_shard, write_text, LoadedSpec};
use crate::{
    AlgorithmArg, Command, Family, PermArg, PipelineArgs, ReportFormat, TransformArgs, VariantArg,
};

pub fn run(command: Command, seed: u64) -> Result<()> {
    match command {
        Command::Gen { family, out } => {
            let spec = match family {
                Family::Evenodd { p } => evenodd(p)?,
                Family::Mdr1 => mdr1_6_4(),
                Family::Cauchy { n, k, w } => cauchy_binary_mds(n, k, w)?,
            };
            write_text(out.as_deref(), &SpecFile::from_spec(&spec).to_json())
        }
        Command::Encode {
            spec,
            input,
            shards,
        } => {
            let loaded = load_spec(&spec)?;
            let data = fs::read(&input).map_err(|e| CliError::io(&input, e))?;
            encode(&loaded, &data, &shards)
        }
        Command::Erase { shards, node } => {
            let path = shard_path(&shards, node);
            fs::remove_file(&path).map_err(|e| CliError::io(&path, e))?;
            println!("{}", json!({ "erased": node, "path": path }));
            Ok(())
        }
        Command::Repair {
            spec,
            shards,
            node,
            format,
        } => repair(&load_spec(&spec)?, &shards, node, format),
        Command::Decode { spec, shards, out } => decode(&load_spec(&spec)?, &shards, &out),
        Command::Verify { spec } => {
            let loaded = load_spec(&spec)?;
            let s = &loaded.spec;
            match s.verify_mds() {
                MdsVerdict::Mds => {
                    println!(
                        "OK: {} (n={}, k={}, alpha={}) is MDS over all {}-subsets",
                        s.name(),
                        s.n(),
                        s.k(),
                        s.alpha(),
                        s.k()
                    );
                    Ok(())
                }
                MdsVerdict::Counterexample(nodes) => Err(CliError::Invariant(format!(
                    "{} is not MDS: nodes {nodes:?} cannot decode",
                    s.name()
                ))),
            }
        }
        Command::Transform(args) => transform(args),
        Command::Pipeline(args) => pipeline(args, seed),
        Command::Report {
            spec,
            format,
            trials,
        } => {
            let loaded = load_spec(&spec)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let reports = match &loaded.code {
                Some(code) => simulate_repair_all(code, trials, &mut rng)?,
                None => simulate_repair_all(&loaded.spec, trials, &mut rng)?,
            };
            print_reports(&loaded, reports, format);
            Ok(())
        }
    }
}

fn print_reports(loaded: &LoadedSpec, reports: Vec<RepairReport>, format: ReportFormat) {
    let set = ReportSet::new(&loaded.spec, reports);
    let text = match format {
        ReportFormat::Text => set.to_text(),
        ReportFormat::Csv => set.to_csv(),
        ReportFormat::Json => set.to_json(),
    };
    print!("{text}");
    if !text.ends_with('\n') {
        println!();
    }
}

fn encode(loaded: &LoadedSpec, data: &[u8], dir: &std::path::Path) -> Result<()> {
    let spec = &loaded.spec;
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let stripes = bytes_to_stripes(data, spec.message_len());
    let codewords = stripes
        .iter()
        .map(|m| spec.encode(m))
        .collect::<repairforge::Result<Vec<_>>>()?;
    let hash = spec_sha256(spec);
    for node in 0..spec.n() {
        let bits = BitVector::concat(codewords.iter().map(|c| c.node(node)));
        write_shard(
            dir,
            &Shard {
                node,
                alpha: spec.alpha(),
                stripes: stripes.len(),
                message_bits: data.len() as u64 * 8,
                spec_hash: hash,
                bits,
            },
        )?;
    }
    println!(
        "{}",
        json!({ "code": spec.name(), "nodes": spec.n(), "stripes": stripes.len(), "bytes": data.len() })
    );
    Ok(())
}

fn repair(
    loaded: &LoadedSpec,
    dir: &std::path::Path,
    node: usize,
    format: ReportFormat,
) -> Result<()> {
    let spec = &loaded.spec;
    if node >= spec.n() {
        return Err(CliError::Config(format!(
            "node {node} outside 0..{}",
            spec.n()
        )));
    }
    let shards = read_shards(dir, spec)?;
    let mut helpers = Vec::with_capacity(spec.n());
    for (j, s) in shards.iter().enumerate() {
        match s {
            Some(s) if j != node => helpers.push(s),
            None if j != node => {
                return Err(CliError::Invariant(format!(
                    "repair of node {node} needs every other node, but shard {j} is missing"
                )))
            }
            _ => {}
        }
    }
    let template = helpers[0];
    if helpers
        .iter()
        .any(|s| s.stripes != template.stripes || s.message_bits != template.message_bits)
    {
        return Err(CliError::Invariant(
            "shards disagree on the file layout".into(),
        ));
    }
    let mut rebuilt = Vec::with_capacity(template.stripes);
    let mut report = None;
    for stripe in 0..template.stripes {
        let payloads = (0..spec.n())
            .map(|j| match &shards[j] {
                Some(s) if j != node => s.stripe(stripe),
                _ => BitVector::zeros(spec.alpha()),
            })
            .collect();
        let codeword = Codeword { payloads };
        let (payload, rep) = match &loaded.code {
            Some(code) => code.repair(node, &codeword)?,
            None => spec.repair_with_strategy(node, &codeword)?,
        };
        rebuilt.push(payload);
        report.get_or_insert(rep);
    }
    let shard = Shard {
        node,
        alpha: spec.alpha(),
        stripes: template.stripes,
        message_bits: template.message_bits,
        spec_hash: template.spec_hash,
        bits: BitVector::concat(&rebuilt),
    };
    write_shard(dir, &shard)?;
    let report = report.ok_or_else(|| CliError::Format("shards hold no stripes".into()))?;
    print_reports(loaded, vec![report], format);
    Ok(())
}

fn decode(loaded: &LoadedSpec, dir: &std::path::Path, out: &std::path::Path) -> Result<()> {
    let spec = &loaded.spec;
    let shards = read_shards(dir, spec)?;
    let present: Vec<&Shard> = shards.iter().flatten().take(spec.k()).collect();
    if present.len() < spec.k() {
        return Err(CliError::Invariant(format!(
            "only {} shards present, {} needed",
            present.len(),
            spec.k()
        )));
    }
    let stripes = present[0].stripes;
    if present
        .iter()
        .any(|s| s.stripes != stripes || s.message_bits != present[0].message_bits)
    {
        return Err(CliError::Invariant(
            "shards disagree on the file layout".into(),
        ));
    }
    let messages = (0..stripes)
        .map(|t| {
            let part: Vec<(usize, BitVector)> =
                present.iter().map(|s| (s.node, s.stripe(t))).collect();
            match &loaded.code {
                Some(code) => code.decode(&part),
                None => spec.reconstruct(&part),
            }
        })
        .collect::<repairforge::Result<Vec<_>>>()?;
    let data = stripes_to_bytes(&messages, present[0].message_bits);
    fs::write(out, &data).map_err(|e| CliError::io(out, e))?;
    println!(
        "{}",
        json!({ "bytes": data.len(), "from_nodes": present.iter().map(|s| s.node).collect::<Vec<_>>() })
    );
    Ok(())
}

fn perm_policy(p: PermArg) -> PermPolicy {
    match p {
        PermArg::Auto => PermPolicy::Auto,
        PermArg::Identity => PermPolicy::Identity,
        PermArg::Cyclic => PermPolicy::Cyclic,
    }
}

fn transform(args: TransformArgs) -> Result<()> {
    let loaded = load_spec(&args.spec)?;
    let base = &loaded.spec;
    let config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            serde_json::from_str::<TransformConfig>(&text)
                .map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?
        }
        None => {
            if args.targets.is_empty() {
                return Err(CliError::Config(
                    "either --config or --targets is required".into(),
                ));
            }
            let variant = match args.variant {
                VariantArg::PairTargets => Variant::PairTargets,
                VariantArg::PairRemainders => Variant::PairRemainders,
            };
            let r = args.targets.len();
            let perms = match args.perms {
                PermArg::Auto => default_perms(base, &args.targets, base.alpha()),
                PermArg::Identity => identity_perms(r),
                PermArg::Cyclic => cyclic_perms(r),
            };
            TransformConfig::new(args.targets, variant, base.alpha()).with_perms(perms)
        }
    };
    let code = apply_transform(base, config)?;
    let file = SpecFile::from_transformed(&code, Vec::new()).with_lineage_base(loaded.file.clone());
    write_text(Some(&args.out), &file.to_json())?;
    println!(
        "{}",
        json!({ "code": code.spec().name(), "alpha": code.alpha(), "roles": code.roles().iter().map(|r| format!("{r:?}")).collect::<Vec<_>>() })
    );
    Ok(())
}

fn pipeline(args: PipelineArgs, seed: u64) -> Result<()> {
    let loaded = load_spec(&args.base)?;
    let out = match args.algorithm {
        AlgorithmArg::Alg1 => algorithm1(
            &loaded.spec,
            &Algorithm1Options {
                perms: perm_policy(args.perms),
                pair_targets_only: args.pair_targets_only,
                trials: args.trials,
                seed,
            },
        )?,
        AlgorithmArg::Alg2 => algorithm2(
            &loaded.spec,
            &Algorithm2Options {
                perms: perm_policy(args.perms),
                force_space_share: args.force_space_share,
                trials: args.trials,
                seed,
            },
        )?,
    };
    let mut file: Option<SpecFile> = None;
    for (t, code) in out.rounds.iter().enumerate() {
        let notes = if t + 1 == out.rounds.len() {
            out.notes.clone()
        } else {
            Vec::new()
        };
        let next = SpecFile::from_transformed(code, notes);
        file = Some(match file {
            Some(prev) => next.with_lineage_base(prev),
            None => next,
        });
    }
    let file = file.expect("pipelines run at least one round");
    write_text(Some(&args.out), &file.to_json())?;
    let manifest = out.manifest(&loaded.spec);
    let manifest_json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    if let Some(path) = &args.manifest {
        write_text(Some(path), &manifest_json)?;
    }
    println!(
        "{}",
        json!({
            "algorithm": out.algorithm,
            "rounds": out.rounds.len(),
            "space_shared": out.space_shared,
            "final_alpha": out.final_code().alpha(),
            "spec": file.name,
        })
    );
    Ok(())
}

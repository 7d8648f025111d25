//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach stdout.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use divrank::config::{PipelineConfig, Ranker, Retrieval};
use divrank::experiment::{impression_log, impression_sweep, relative_delta, SweepConfig};
use divrank::{
    generate_corpus, generate_queries, run_pipeline, Engine, GenConfig, QueryGenConfig,
    TopologyConfig,
};
use divrank_core::ann::{
    bucketized_knn, cosine_distance, overfetch_and_rerank, AnnTopology, OverfetchConfig,
};
use divrank_core::metrics::{div_at_k, evaluate};
use divrank_core::rerank::cholesky::CholeskyState;
use divrank_core::rerank::oracle::dense_log_det;
use divrank_core::rerank::{
    build_similarity, dpp_rerank, greedy_select, greedy_sequence_oracle, round_robin, DppConfig,
    KernelTransform, RoundRobinConfig, Similarity,
};
use divrank_core::token::{
    eval_or, eval_strong_or, InvertedIndex, Quota, SQuery, StrongOr, StrongOrChild,
};
use divrank_core::{Corpus, DiversitySpec, GroupId, Item, ItemId, RankedList, ScoredItem};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn spec(n: usize) -> DiversitySpec {
    DiversitySpec::new("tone", (1..=n).map(|i| format!("d{i}")), true).unwrap()
}

/// Utility-sorted list over 1-based group numbers, 0 = group-less.
fn ranking(groups: &[u16]) -> RankedList {
    let n = groups.len() as f64;
    RankedList::new(
        "q",
        groups
            .iter()
            .enumerate()
            .map(|(i, &g)| {
                let group = (g > 0).then(|| GroupId(g - 1));
                ScoredItem::new(i as u64 + 1, 1.0 - i as f64 / n, group)
            })
            .collect(),
    )
}

fn group_numbers(list: &RankedList) -> Vec<u16> {
    list.entries
        .iter()
        .map(|e| e.group.map_or(0, |g| g.0 + 1))
        .collect()
}

const FIGURE: [u16; 14] = [1, 1, 1, 2, 3, 1, 2, 1, 3, 4, 4, 1, 2, 2];

fn c01_round_robin_golden() -> Outcome {
    let out = round_robin(&ranking(&FIGURE), &spec(4), &RoundRobinConfig::default());
    let got = group_numbers(&out);
    let want = [1, 2, 3, 4, 1, 2, 3, 4, 1, 2, 1, 2, 1, 1];
    ensure(got == want, || format!("got {got:?}"))?;
    Ok("exact match".into())
}

fn random_similarity(rng: &mut StdRng, variant: usize) -> Similarity {
    match variant % 3 {
        0 => Similarity::Equality {
            off_diag: rng.random_range(0.0..0.9),
        },
        1 => Similarity::Linear,
        _ => Similarity::Exponential {
            alpha: rng.random_range(0.2..3.0),
        },
    }
}

fn random_groups(
    rng: &mut StdRng,
    n: usize,
    num_groups: usize,
    groupless: f64,
) -> Vec<Option<GroupId>> {
    (0..n)
        .map(|_| {
            (!rng.random_bool(groupless)).then(|| GroupId(rng.random_range(0..num_groups as u16)))
        })
        .collect()
}

fn descending(rng: &mut StdRng, n: usize) -> Vec<f64> {
    let mut u: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
    u.sort_by(|a, b| b.total_cmp(a));
    u
}

fn c02_greedy_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let thetas = [0.0, 0.25, 1.0, 4.0];
    let (mut steps, mut matched) = (0, 0);
    for i in 0..200 {
        let n = rng.random_range(1..=12);
        let window = [2, 3, 4][i % 3];
        let theta = thetas[(i / 3) % 4];
        let num_groups = rng.random_range(2..=5);
        let similarity = random_similarity(&mut rng, i / 12);
        let groups = random_groups(&mut rng, n, num_groups, 0.1);
        let utilities = descending(&mut rng, n);
        let s = build_similarity(
            &groups,
            &spec(num_groups),
            similarity,
            KernelTransform::Identity,
            1e-6,
        );
        let fast = greedy_select(&utilities, &s, theta, window, n).map_err(|e| e.to_string())?;
        let slow =
            greedy_sequence_oracle(&s, &utilities, theta, window, n).map_err(|e| e.to_string())?;
        steps += n;
        matched += fast
            .iter()
            .zip(&slow)
            .take_while(|(f, &o)| f.chosen == o)
            .count();
    }
    ensure(matched == steps, || {
        format!("{matched}/{steps} steps agree")
    })?;
    Ok(format!("{steps}/{steps} steps agree over 200 instances"))
}

fn c03_log_det_consistency() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(1..=64);
        let b: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = (0..n).map(|k| b[i * n + k] * b[j * n + k]).sum::<f64>() / n as f64;
            }
            a[i * n + i] += 0.1;
        }
        let mut state = CholeskyState::new();
        let mut cumulative = 0.0;
        for i in 0..n {
            let row: Vec<f64> = (0..=i).map(|j| a[i * n + j]).collect();
            cumulative += state.extend(&row).map_err(|e| e.to_string())?;
        }
        let direct = dense_log_det(a, n).map_err(|e| e.to_string())?;
        worst = worst.max((cumulative - direct).abs() / direct.abs().max(1.0));
    }
    ensure(worst <= 1e-8, || format!("max relative error {worst:e}"))?;
    Ok(format!("max relative error {worst:.1e}"))
}

fn c04_theta_limits() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    for i in 0..50 {
        let n = rng.random_range(2..=30);
        let num_groups = rng.random_range(2..=5);
        let groups = random_groups(&mut rng, n, num_groups, 0.1);
        let utilities: Vec<f64> = (0..n)
            .map(|j| 1.0 - 0.01 * j as f64 - rng.random_range(0.0..0.002))
            .collect();
        let similarity = random_similarity(&mut rng, i);
        let s = build_similarity(
            &groups,
            &spec(num_groups),
            similarity,
            KernelTransform::Identity,
            1e-6,
        );
        let order: Vec<usize> = greedy_select(&utilities, &s, 1000.0, rng.random_range(1..=8), n)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|s| s.chosen)
            .collect();
        ensure(order.windows(2).all(|w| w[0] < w[1]), || {
            format!("theta=1000 order {order:?}")
        })?;
    }
    for _ in 0..50 {
        let num_groups = rng.random_range(2..=6);
        let n = rng.random_range(num_groups..=40);
        let groups = random_groups(&mut rng, n, num_groups, 0.0);
        let utilities = descending(&mut rng, n);
        let batch = rng.random_range(1..=n);
        let s = build_similarity(
            &groups,
            &spec(num_groups),
            Similarity::Equality { off_diag: 0.0 },
            KernelTransform::Identity,
            1e-6,
        );
        let picks =
            greedy_select(&utilities, &s, 0.0, num_groups, batch).map_err(|e| e.to_string())?;
        let available = groups.iter().flatten().collect::<BTreeSet<_>>().len();
        let prefix = available.min(batch);
        let distinct = picks[..prefix]
            .iter()
            .map(|p| groups[p.chosen])
            .collect::<BTreeSet<_>>()
            .len();
        ensure(distinct == prefix, || {
            format!("theta=0 prefix has {distinct} of {prefix} groups")
        })?;
    }
    Ok("kendall tau 1 on 50/50; distinct-group prefix on 50/50".into())
}

const VOCAB: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

fn matches(query: &SQuery, tokens: &BTreeSet<&str>) -> bool {
    match query {
        SQuery::Term(t) => tokens.contains(t.as_str()),
        SQuery::And(c) => c.iter().all(|q| matches(q, tokens)),
        SQuery::Or(c) => c.iter().any(|q| matches(q, tokens)),
        SQuery::StrongOr(_) => false,
    }
}

fn c05_strong_or_quotas() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let (mut instances, mut identical) = (0, 0);
    while instances < 1000 {
        let n = rng.random_range(5..150);
        let rates: Vec<f64> = VOCAB.iter().map(|_| rng.random_range(0.02..0.6)).collect();
        let docs: Vec<BTreeSet<&str>> = (0..n)
            .map(|_| {
                VOCAB
                    .iter()
                    .zip(&rates)
                    .filter(|&(_, &p)| rng.random_bool(p))
                    .map(|(t, _)| *t)
                    .collect()
            })
            .collect();
        let index = InvertedIndex::from_docs(
            docs.iter()
                .enumerate()
                .map(|(i, d)| (ItemId(i as u64 * 2 + 1), d.clone())),
        );
        let k = rng.random_range(1..=20);
        let children: Vec<SQuery> = (0..rng.random_range(2..=4))
            .map(|_| {
                let shape = rng.random_range(0..4);
                let mut term = || SQuery::term(VOCAB[rng.random_range(0..VOCAB.len())]);
                match shape {
                    0 => SQuery::And(vec![term(), term()]),
                    1 => SQuery::Or(vec![term(), term()]),
                    _ => term(),
                }
            })
            .collect();
        let sets: Vec<BTreeSet<u64>> = children
            .iter()
            .map(|q| {
                (0..n)
                    .filter(|&p| matches(q, &docs[p]))
                    .map(|p| p as u64 * 2 + 1)
                    .collect()
            })
            .collect();
        let mut budget = k;
        let quotas: Vec<Option<usize>> = sets
            .iter()
            .map(|set| {
                let cap = set.len().min(budget);
                if cap == 0 || rng.random_bool(0.3) {
                    return None;
                }
                let need = rng.random_range(1..=cap);
                budget -= need;
                Some(need)
            })
            .collect();
        if quotas.iter().all(Option::is_none) {
            continue;
        }
        instances += 1;
        let node = StrongOr {
            children: children
                .iter()
                .zip(&quotas)
                .map(|(q, need)| StrongOrChild {
                    query: q.clone(),
                    quota: need.map(Quota::MinCount),
                })
                .collect(),
            scan_limit: k,
        };
        let main = eval_strong_or(&index, &node)
            .map_err(|e| e.to_string())?
            .main;
        let plain = eval_or(&index, &children, k).map_err(|e| e.to_string())?;
        let satisfies = |ids: &[ItemId]| {
            quotas.iter().zip(&sets).all(|(need, set)| {
                need.is_none_or(|need| ids.iter().filter(|id| set.contains(&id.0)).count() >= need)
            })
        };
        ensure(satisfies(&main), || {
            format!("quota violated: {node:?} -> {main:?}")
        })?;
        if satisfies(&plain) {
            ensure(main == plain, || format!("differs from plain OR: {node:?}"))?;
            identical += 1;
        }
    }
    Ok(format!(
        "1000/1000 satisfy quotas; {identical} OR-satisfied instances identical to OR"
    ))
}

fn c06_strong_or_golden() -> Outcome {
    let index = InvertedIndex::from_docs((1..=10u64).map(|i| {
        let mut tokens = Vec::new();
        if [1, 6, 9].contains(&i) {
            tokens.push("A");
        }
        if i != 6 {
            tokens.push("B");
        }
        (ItemId(i), tokens)
    }));
    let SQuery::StrongOr(node) =
        SQuery::parse("SOR(K=5; A{min=3}, B)").map_err(|e| e.to_string())?
    else {
        return Err("not a Strong-OR".into());
    };
    let main: Vec<u64> = eval_strong_or(&index, &node)
        .map_err(|e| e.to_string())?
        .main
        .iter()
        .map(|i| i.0)
        .collect();
    ensure(main == [1, 2, 3, 6, 9], || format!("got {main:?}"))?;
    Ok("main = [1, 2, 3, 6, 9]".into())
}

fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

fn c07_bucketized_exactness() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let dim = 64;
    let mut checks = 0;
    for round in 0..50 {
        let n = rng.random_range(100..=10_000);
        // Every other corpus uses coarse coordinates so distance ties occur.
        let coarse = round % 2 == 1;
        let items: Vec<Item> = (0..n)
            .map(|i| {
                let v: Vec<f64> = (0..dim)
                    .map(|_| {
                        if coarse {
                            rng.random_range(-1i32..=1) as f64
                        } else {
                            rng.random_range(-1.0..1.0)
                        }
                    })
                    .collect();
                let v = if v.iter().all(|&x| x == 0.0) {
                    vec![1.0; dim]
                } else {
                    v
                };
                let group = (!rng.random_bool(0.1)).then(|| {
                    let r: f64 = rng.random();
                    GroupId(if r < 0.7 {
                        0
                    } else if r < 0.85 {
                        1
                    } else if r < 0.95 {
                        2
                    } else {
                        3
                    })
                });
                Item {
                    id: ItemId(i as u64 * 13 + 5),
                    embedding: unit(v),
                    tokens: BTreeSet::new(),
                    group,
                    category: String::new(),
                }
            })
            .collect();
        let corpus = Corpus::new(spec(4), dim, items).map_err(|e| e.to_string())?;
        let topology = AnnTopology::with_salt(
            &corpus,
            [1, 2, 4][round % 3],
            [1, 4][(round / 3) % 2],
            rng.random(),
        )
        .map_err(|e| e.to_string())?;
        let query = unit((0..dim).map(|_| rng.random_range(-1.0..1.0)).collect());
        let (k, k_d) = (rng.random_range(1..=100), rng.random_range(0..=20));
        let got = bucketized_knn(&corpus, &topology, &query, k, k_d).map_err(|e| e.to_string())?;

        let mut all: Vec<(f64, ItemId, Option<GroupId>)> = corpus
            .iter()
            .map(|it| (cosine_distance(&query, &it.embedding), it.id, it.group))
            .collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let main: Vec<ItemId> = all.iter().take(k).map(|x| x.1).collect();
        ensure(
            got.main.iter().map(|x| x.id).eq(main.iter().copied()),
            || format!("main differs in round {round}"),
        )?;
        for g in 0..4u16 {
            let want = all
                .iter()
                .filter(|x| x.2 == Some(GroupId(g)))
                .take(k_d)
                .map(|x| x.1);
            ensure(
                got.buckets[g as usize].iter().map(|x| x.id).eq(want),
                || format!("bucket d{} differs in round {round}", g + 1),
            )?;
        }
        checks += 1;
    }
    Ok(format!("{checks}/50 corpora bit-exact"))
}

/// Items on an arc around `[1, 0, 0]`; rank r sits at angle 0.001·r. Group d4
/// appears from rank `first_d4` on, every `stride` ranks.
fn arc_corpus(n: usize, first_d4: usize, stride: usize) -> Corpus {
    let items = (0..n)
        .map(|r| {
            let a = 0.001 * r as f64;
            let g = if r >= first_d4 && (r - first_d4).is_multiple_of(stride) {
                3
            } else {
                (r % 3) as u16
            };
            Item {
                id: ItemId(((r * 7919) % 10_007) as u64),
                embedding: vec![a.cos(), a.sin(), 0.0],
                tokens: BTreeSet::new(),
                group: Some(GroupId(g)),
                category: String::new(),
            }
        })
        .collect();
    Corpus::new(spec(4), 3, items).unwrap()
}

/// Doubling schedule computed from the brute-force ranking.
fn expected_schedule(corpus: &Corpus, query: &[f64], cfg: &OverfetchConfig) -> Vec<usize> {
    let mut all: Vec<(f64, ItemId, Option<GroupId>)> = corpus
        .iter()
        .map(|it| (cosine_distance(query, &it.embedding), it.id, it.group))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut size = cfg.k;
    let mut schedule = vec![size];
    loop {
        let ok = (0..4u16).all(|g| {
            all[..size.min(all.len())]
                .iter()
                .filter(|x| x.2 == Some(GroupId(g)))
                .count()
                >= cfg.k_min
        });
        if ok || size >= cfg.k_max {
            return schedule;
        }
        size = ((cfg.growth * size as f64).ceil() as usize).min(cfg.k_max);
        schedule.push(size);
    }
}

fn c08_overfetch_schedule() -> Outcome {
    let k = 10;
    let corpus = arc_corpus(1000, 3 * k, 5);
    let topology = AnnTopology::new(&corpus, 2, 4).map_err(|e| e.to_string())?;
    let query = [1.0, 0.0, 0.0];
    let mut summary = Vec::new();
    for cfg in [
        OverfetchConfig::new(k, 1),
        OverfetchConfig {
            k_max: 320,
            ..OverfetchConfig::new(k, 1)
        },
        OverfetchConfig {
            k_max: 320,
            ..OverfetchConfig::new(k, 3)
        },
        OverfetchConfig {
            k_max: 320,
            ..OverfetchConfig::new(k, 5)
        },
    ] {
        let outcome =
            overfetch_and_rerank(&corpus, &topology, &query, &cfg).map_err(|e| e.to_string())?;
        let want = expected_schedule(&corpus, &query, &cfg);
        ensure(outcome.schedule == want, || {
            format!("schedule {:?}, expected {want:?}", outcome.schedule)
        })?;
        ensure(
            outcome.final_size() <= cfg.k_max && outcome.ids.len() == k,
            || "bad final size".into(),
        )?;
        summary.push(format!("{:?}", outcome.schedule));
    }
    ensure(summary[0] == "[10, 20]", || {
        format!("default cap schedule {}", summary[0])
    })?;
    Ok(format!("schedules {}", summary.join(" ")))
}

fn c09_div_properties() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9);
    let s = spec(4);
    for _ in 0..1000 {
        let len = rng.random_range(0..40);
        let groups: Vec<u16> = (0..len).map(|_| rng.random_range(0..=4)).collect();
        let r = [ranking(&groups)];
        let mut last = 0.0;
        for k in 4..=40 {
            let d = div_at_k(&r, &s, k).map_err(|e| e.to_string())?;
            ensure(d >= last, || {
                format!("not monotone at k={k} for {groups:?}")
            })?;
            last = d;
        }
    }
    let fig = [ranking(&FIGURE)];
    let d10 = div_at_k(&fig, &s, 10).map_err(|e| e.to_string())?;
    let d4 = div_at_k(&fig, &s, 4).map_err(|e| e.to_string())?;
    ensure(d10 == 1.0 && d4 == 0.0, || {
        format!("figure Div@10={d10} Div@4={d4}")
    })?;
    let skip = div_at_k(&[ranking(&[0, 1, 0, 2])], &spec(2), 2).map_err(|e| e.to_string())?;
    ensure(skip == 1.0, || {
        format!("group-less skip example gives {skip}")
    })?;
    Ok("monotone on 1000/1000; figure Div@10=1 Div@4=0; skip example 1.0".into())
}

fn demo_engine() -> Result<(Engine, Vec<divrank::Query>), String> {
    let corpus = generate_corpus(&GenConfig {
        n: 50_000,
        ..Default::default()
    })
    .map_err(|e| e.to_string())?;
    let engine = Engine::new(corpus, TopologyConfig::default()).map_err(|e| e.to_string())?;
    let queries = generate_queries(
        &engine.corpus,
        &QueryGenConfig {
            count: 500,
            categories: vec!["fashion".into(), "beauty".into()],
            ..Default::default()
        },
    )
    .map_err(|e| e.to_string())?;
    Ok((engine, queries))
}

fn c10_end_to_end(engine: &Engine, queries: &[divrank::Query]) -> Outcome {
    let control = PipelineConfig::new(Retrieval::EmbPlain, Ranker::UtilityOnly);
    let treatment = PipelineConfig::new(
        Retrieval::EmbBucketized { k_d: 3 },
        Ranker::Dpp(DppConfig {
            window: 10,
            batch_size: 20,
            depth: 200,
            ..Default::default()
        }),
    );
    let spec = engine.corpus.spec();
    let c = run_pipeline(engine, &control, queries).map_err(|e| e.to_string())?;
    let t = run_pipeline(engine, &treatment, queries).map_err(|e| e.to_string())?;
    let cm = evaluate(&c.rankings, spec, 10).map_err(|e| e.to_string())?;
    let tm = evaluate(&t.rankings, spec, 10).map_err(|e| e.to_string())?;
    let div = relative_delta(cm.div_at_k, tm.div_at_k).ok_or("control Div@10 is 0")?;
    let util =
        relative_delta(cm.mean_utility_at_k, tm.mean_utility_at_k).ok_or("control utility is 0")?;
    let detail = format!(
        "Div@10 {:.3} -> {:.3} ({div:+.1}%), utility@10 {:.4} -> {:.4} ({util:+.2}%)",
        cm.div_at_k, tm.div_at_k, cm.mean_utility_at_k, tm.mean_utility_at_k
    );
    ensure(div >= 200.0 && util >= -5.0, || detail.clone())?;
    Ok(detail)
}

fn c11_table_trend(engine: &Engine, queries: &[divrank::Query]) -> Outcome {
    let run = run_pipeline(
        engine,
        &PipelineConfig::new(Retrieval::EmbPlain, Ranker::UtilityOnly),
        queries,
    )
    .map_err(|e| e.to_string())?;
    let cfg = SweepConfig::default();
    let log = impression_log(&run.rankings, &cfg).map_err(|e| e.to_string())?;
    let rows = impression_sweep(&log, engine, &cfg).map_err(|e| e.to_string())?;
    let text: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "k={} div={:.3} eligible={}",
                r.k, r.div_at_k, r.eligible_queries
            )
        })
        .collect();
    let ok = rows
        .windows(2)
        .all(|w| w[1].div_at_k >= w[0].div_at_k && w[1].eligible_queries <= w[0].eligible_queries);
    ensure(ok, || text.join(", "))?;
    Ok(text.join(", "))
}

fn c12_dpp_latency() -> Outcome {
    let mut rng = StdRng::seed_from_u64(12);
    let utilities = descending(&mut rng, 400);
    let list = RankedList::new(
        "bench",
        utilities
            .iter()
            .enumerate()
            .map(|(i, &u)| ScoredItem::new(i as u64, u, Some(GroupId(rng.random_range(0..4)))))
            .collect(),
    );
    let cfg = DppConfig {
        window: 8,
        batch_size: 200,
        depth: 400,
        ..Default::default()
    };
    let mut times: Vec<Duration> = (0..7)
        .map(|_| {
            let start = Instant::now();
            let out = dpp_rerank(&list, &spec(4), &cfg);
            let elapsed = start.elapsed();
            assert!(out.is_ok());
            elapsed
        })
        .collect();
    times.sort();
    let median = times[times.len() / 2];
    let ms = median.as_secs_f64() * 1e3;
    ensure(ms <= 10.0, || format!("median {ms:.2} ms"))?;
    Ok(format!("median {ms:.2} ms over 7 runs"))
}

struct Report {
    failures: usize,
}

impl Report {
    fn run(&mut self, id: u32, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(limit)) if elapsed > limit => {
                Err(format!("took {elapsed:.2?}, limit {limit:?}"))
            }
            (o, _) => o,
        };
        let (status, detail) = match &outcome {
            Ok(d) => ("PASS", d.as_str()),
            Err(d) => ("FAIL", d.as_str()),
        };
        if outcome.is_err() {
            self.failures += 1;
        }
        println!("criterion {id:>2} {status}  {name} [{elapsed:.2?}]: {detail}");
    }
}

fn main() -> ExitCode {
    let mut report = Report { failures: 0 };
    let ms = Duration::from_millis;
    let s = Duration::from_secs;
    report.run(
        1,
        "round-robin golden sequence",
        Some(ms(1)),
        c01_round_robin_golden,
    );
    report.run(
        2,
        "dpp greedy matches determinant oracle",
        Some(s(5)),
        c02_greedy_oracle,
    );
    report.run(
        3,
        "incremental log-det vs dense factorization",
        Some(s(2)),
        c03_log_det_consistency,
    );
    report.run(4, "theta limits", None, c04_theta_limits);
    report.run(
        5,
        "strong-or quota satisfaction",
        Some(s(5)),
        c05_strong_or_quotas,
    );
    report.run(6, "strong-or golden scenario", None, c06_strong_or_golden);
    report.run(
        7,
        "bucketized ann exactness",
        Some(s(30)),
        c07_bucketized_exactness,
    );
    report.run(
        8,
        "overfetch-and-rerank schedule",
        None,
        c08_overfetch_schedule,
    );
    report.run(9, "div@k properties", None, c09_div_properties);
    let start = Instant::now();
    match demo_engine() {
        Ok((engine, queries)) => {
            let remaining = s(120).saturating_sub(start.elapsed());
            report.run(
                10,
                "end-to-end directional reproduction",
                Some(remaining),
                || c10_end_to_end(&engine, &queries),
            );
            report.run(11, "impression-log depth trend", None, || {
                c11_table_trend(&engine, &queries)
            });
        }
        Err(e) => {
            report.run(10, "end-to-end directional reproduction", None, || {
                Err(e.clone())
            });
            report.run(11, "impression-log depth trend", None, || Err(e));
        }
    }
    report.run(12, "dpp latency, N=400 w=8 B=200", None, c12_dpp_latency);
    println!(
        "acceptance: {} passed, {} failed",
        12 - report.failures,
        report.failures
    );
    if report.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

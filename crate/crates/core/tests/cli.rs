use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use wideband_eed::cli::HEADER;

fn eed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eed"))
        .args(args)
        .env("EED_THREADS", "2")
        .output()
        .expect("run eed")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "eed failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn header_and_rows(text: &str) -> (String, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().expect("header").to_string();
    (
        header,
        lines
            .map(|l| l.split(',').map(String::from).collect())
            .collect(),
    )
}

fn col(header: &str, name: &str) -> usize {
    header
        .split(',')
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

fn num(row: &[String], idx: usize) -> Option<f64> {
    (!row[idx].is_empty()).then(|| row[idx].parse().unwrap())
}

fn field(header: &str, row: &[String], name: &str) -> Option<f64> {
    num(row, col(header, name))
}

const SWEEP: [&str; 15] = [
    "sweep",
    "--nt",
    "4",
    "--nr",
    "2",
    "--eta",
    "0.2",
    "--l",
    "1,2,4",
    "--snr-db",
    "0:40:5",
    "--samples",
    "100000",
    "--seed",
    "42",
];

#[test]
fn sweep_example_has_27_rows_and_exact_header() {
    let mut args = SWEEP.to_vec();
    args.extend(["--emit", "mc,asy"]);
    let text = stdout(&eed(&args));
    assert_eq!(text.lines().next().unwrap(), HEADER);
    let (header, rows) = header_and_rows(&text);
    assert_eq!(rows.len(), 27);
    for row in &rows {
        assert_eq!(row.len(), header.split(',').count());
        for name in ["ed_asy", "ed_mc"] {
            if let Some(v) = field(&header, row, name) {
                assert!(v > 0.0 && v <= 1.0, "{name}={v}");
            }
        }
        assert!(field(&header, row, "inf_mc").is_none());
    }
}

#[test]
fn sweep_is_byte_identical_across_runs_and_thread_counts() {
    let mut args = SWEEP.to_vec();
    args.extend(["--emit", "mc,asy,inf_mc,inf_asy"]);
    let a = eed(&args);
    let b = eed(&args);
    let c = Command::new(env!("CARGO_BIN_EXE_eed"))
        .args(&args)
        .env("EED_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(stdout(&a), stdout(&c));
}

#[test]
fn zero_db_distortion_is_at_most_ps() {
    let text = stdout(&eed(&[
        "sweep", "--snr-db", "0:0:1", "--l", "1", "--emit", "mc", "--ps", "2.5",
    ]));
    let (header, rows) = header_and_rows(&text);
    assert_eq!(rows.len(), 1);
    let v = field(&header, &rows[0], "ed_mc").unwrap();
    assert!(v > 0.0 && v <= 2.5);
}

#[test]
fn regime_reports() {
    let report = |l: &str| {
        stdout(&eed(&[
            "regime", "--nt", "4", "--nr", "2", "--eta", "0.2", "--l", l,
        ]))
    };
    assert!(report("1").starts_with("low, beta=10, L*=4"));
    assert!(report("4").starts_with("high, beta=2.5, L*=4"));
    assert!(report("3").starts_with("moderate, s=1"));
}

#[test]
fn limit_rows_are_bounded_and_correlation_raises_the_bound() {
    let base = [
        "limit",
        "--snr-db",
        "0:30:10",
        "--samples",
        "20000",
        "--seed",
        "3",
    ];
    let unc = stdout(&eed(&base));
    let (header, rows) = header_and_rows(&unc);
    assert_eq!(rows.len(), 4);
    assert!(field(&header, &rows[0], "inf_mc").unwrap() <= 1.0);
    let mut args = base.to_vec();
    args.extend(["--corr", "exp:0.7"]);
    let cor = stdout(&eed(&args));
    let (_, cor_rows) = header_and_rows(&cor);
    for (u, c) in rows.iter().zip(&cor_rows) {
        if let (Some(u), Some(c)) = (field(&header, u, "inf_asy"), field(&header, c, "inf_asy")) {
            assert!(c > u);
        }
        assert!(field(&header, c, "inf_mc").unwrap() > field(&header, u, "inf_mc").unwrap());
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(
        &conf,
        "nt = 2\nnr = 2\neta = 0.5\nl = 1\nsnr_db = 10:20:10\nemit = asy\n",
    )
    .unwrap();
    let conf = conf.to_str().unwrap();
    let (_, rows) = header_and_rows(&stdout(&eed(&["sweep", "--config", conf])));
    assert_eq!(rows.len(), 2);
    let (_, rows) = header_and_rows(&stdout(&eed(&["sweep", "--config", conf, "--l", "1,2"])));
    assert_eq!(rows.len(), 4);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| eed(args).status.code().unwrap();
    assert_eq!(code(&["sweep", "--snr-db", "10:0:1"]), 2);
    assert_eq!(code(&["sweep", "--nt", "0"]), 2);
    assert_eq!(code(&["sweep", "--emit", "bogus"]), 2);
    assert_eq!(code(&["bogus"]), 2);
    // explicit eigenvalues closer than the gap threshold in the moderate regime
    assert_eq!(
        code(&[
            "sweep",
            "--eta",
            "0.5",
            "--emit",
            "asy",
            "--corr",
            "eig:0.99999999999,1.00000000001"
        ]),
        3
    );
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = blocker.join("sub");
    assert_eq!(
        code(&[
            "figures",
            "--samples",
            "100",
            "--out",
            out.to_str().unwrap()
        ]),
        4
    );
    let out = dir.path().join("missing").join("x.csv");
    assert_eq!(
        code(&["sweep", "--emit", "asy", "--out", out.to_str().unwrap()]),
        4
    );
}

fn read_rows(path: &Path) -> (String, Vec<Vec<String>>) {
    header_and_rows(&fs::read_to_string(path).unwrap())
}

#[test]
fn figures_are_written_with_expected_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("figs");
    stdout(&eed(&[
        "figures",
        "--samples",
        "20000",
        "--out",
        out.to_str().unwrap(),
    ]));

    let (h1, fig1) = read_rows(&out.join("fig1.csv"));
    let (h2, fig2) = read_rows(&out.join("fig2.csv"));
    let (h3, fig3) = read_rows(&out.join("fig3.csv"));
    assert_eq!(h1, HEADER);
    assert_eq!(h2, HEADER);
    assert_eq!(h3, format!("r,{HEADER}"));
    // 9 SNR points x (5 diversity orders + limit row)
    assert_eq!(fig1.len(), 54);
    assert_eq!(fig2.len(), 54);
    assert_eq!(fig3.len(), 5 * 54);

    // fig1: at 30 dB the MC distortion decreases with L
    let (snr, l, ed) = (col(&h1, "snr_db"), col(&h1, "L"), col(&h1, "ed_mc"));
    let at30: Vec<f64> = fig1
        .iter()
        .filter(|r| num(r, snr) == Some(30.0) && !r[l].is_empty())
        .map(|r| num(r, ed).unwrap())
        .collect();
    assert_eq!(at30.len(), 5);
    assert!(at30.windows(2).all(|w| w[1] < w[0]), "{at30:?}");

    // fig2: slope of log10(ed_asy) between 30 and 40 dB is -delta/10 per dB
    let (snr, l, ed, delta) = (
        col(&h2, "snr_db"),
        col(&h2, "L"),
        col(&h2, "ed_asy"),
        col(&h2, "delta"),
    );
    for lv in ["1", "2", "3", "4", "8"] {
        let pick = |db: f64| {
            fig2.iter()
                .find(|r| r[l] == lv && num(r, snr) == Some(db))
                .unwrap()
        };
        let (a, b) = (pick(30.0), pick(40.0));
        let slope = (num(b, ed).unwrap().log10() - num(a, ed).unwrap().log10()) / 10.0;
        let expected = -num(a, delta).unwrap() / 10.0;
        // the (ln rho)^p factor of even-parity moderate rows shifts the slope slightly
        let tol = if a[col(&h2, "log_rho_power")] == "0" {
            1e-9
        } else {
            0.02
        };
        assert!(
            (slope - expected).abs() < tol * expected.abs().max(1.0),
            "L={lv}: {slope} vs {expected}"
        );
    }

    // fig3: the correlated infinite-diversity asymptote grows with r
    let (r, l, inf) = (col(&h3, "r"), col(&h3, "L"), col(&h3, "inf_asy"));
    let snr = col(&h3, "snr_db");
    let limits: Vec<f64> = fig3
        .iter()
        .filter(|row| row[l].is_empty() && num(row, snr) == Some(40.0))
        .map(|row| num(row, inf).unwrap())
        .collect();
    assert_eq!(limits.len(), 5);
    assert!(limits.windows(2).all(|w| w[1] > w[0]), "{limits:?}");
    assert_eq!(fig3[0][r], "0");
}

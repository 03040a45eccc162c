use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use qdsig_ffi::*;

fn session(n: usize, seed: u64) -> *mut QdsSession {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { qds_session_new(n, seed, &mut s) }, QdsStatus::Ok);
    assert!(!s.is_null());
    s
}

#[test]
fn honest_session_round_trip() {
    let n = 6;
    let s = session(n, 42);
    unsafe {
        assert_eq!(qds_session_len(s), n);
        let mut g = vec![9u8; n];
        assert_eq!(qds_session_signature(s, g.as_mut_ptr(), n), QdsStatus::WrongPhase);

        let message = [1u8, 0, 1, 1, 0, 0];
        assert_eq!(qds_session_sign(s, message.as_ptr(), n), QdsStatus::Ok);
        assert_eq!(qds_session_signature(s, g.as_mut_ptr(), n), QdsStatus::Ok);
        let mut b = vec![9u8; n];
        assert_eq!(qds_session_bob_signature(s, b.as_mut_ptr(), n), QdsStatus::Ok);
        assert!(g.iter().chain(&b).all(|&x| x <= 1));

        let mut v = std::mem::zeroed::<QdsVerdict>();
        assert_eq!(qds_session_verify(s, true, &mut v), QdsStatus::Ok);
        assert!(v.bob_accepts && v.charlie_accepts);
        assert_eq!(v.blamed, QdsBlame::None);
        assert_eq!((v.v1_failures, v.v2_failures, v.v3_failures, v.crosscheck), (0, 0, 0, 1));
        assert_eq!(qds_session_verify(s, true, &mut v), QdsStatus::WrongPhase);
        qds_session_free(s);
    }
}

#[test]
fn verify_without_crosscheck_reports_not_performed() {
    let s = session(3, 1);
    unsafe {
        assert_eq!(qds_session_sign(s, [0u8, 1, 0].as_ptr(), 3), QdsStatus::Ok);
        let mut v = std::mem::zeroed::<QdsVerdict>();
        assert_eq!(qds_session_verify(s, false, &mut v), QdsStatus::Ok);
        assert_eq!(v.crosscheck, -1);
        assert!(v.charlie_accepts);
        qds_session_free(s);
    }
}

#[test]
fn argument_errors() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(qds_session_new(0, 0, &mut s), QdsStatus::InvalidArgument);
        assert!(s.is_null());
        assert_eq!(qds_session_new(2, 0, ptr::null_mut()), QdsStatus::NullPointer);
        assert_eq!(qds_session_len(ptr::null()), 0);
        qds_session_free(ptr::null_mut());

        let s = session(3, 0);
        assert_eq!(qds_session_sign(s, [0u8, 2, 0].as_ptr(), 3), QdsStatus::InvalidBits);
        assert_eq!(qds_session_sign(s, [0u8, 1].as_ptr(), 2), QdsStatus::LengthMismatch);
        assert_eq!(qds_session_sign(s, ptr::null(), 3), QdsStatus::NullPointer);
        let mut v = std::mem::zeroed::<QdsVerdict>();
        assert_eq!(qds_session_verify(s, true, &mut v), QdsStatus::WrongPhase);
        assert_eq!(qds_session_sign(s, [0u8, 1, 1].as_ptr(), 3), QdsStatus::Ok);
        assert_eq!(qds_session_sign(s, [0u8, 1, 1].as_ptr(), 3), QdsStatus::WrongPhase);
        let mut short = [0u8; 2];
        assert_eq!(qds_session_signature(s, short.as_mut_ptr(), 2), QdsStatus::LengthMismatch);
        qds_session_free(s);
    }
}

#[test]
fn oracle_matches_xor_shadow() {
    let m = [1u8, 0, 1, 0];
    let a = [1u8, 1, 0, 0];
    let c = [0u8, 1, 1, 0];
    let (mut g, mut b) = ([0u8; 4], [0u8; 4]);
    let st = unsafe { qds_oracle_honest(m.as_ptr(), a.as_ptr(), c.as_ptr(), 4, g.as_mut_ptr(), b.as_mut_ptr()) };
    assert_eq!(st, QdsStatus::Ok);
    assert_eq!(g, [0, 1, 1, 0]);
    assert_eq!(b, [0, 0, 0, 0]);
}

#[test]
fn monte_carlo_through_the_abi() {
    let mut out = unsafe { std::mem::zeroed::<QdsTrialStats>() };
    let st = unsafe { qds_monte_carlo(QdsAttack::AmbiguousState, 2, ptr::null(), 20_000, 5, true, 1, &mut out) };
    assert_eq!(st, QdsStatus::Ok);
    assert_eq!((out.n, out.mask_weight, out.trials), (2, 2, 20_000));
    assert_eq!(out.expected_rate, 0.25);
    assert!(out.wilson_99_low <= 0.25 && 0.25 <= out.wilson_99_high);

    let mask = [0u8, 1, 0, 0];
    let st = unsafe { qds_monte_carlo(QdsAttack::NaiveFlip, 4, mask.as_ptr(), 500, 5, true, 2, &mut out) };
    assert_eq!(st, QdsStatus::Ok);
    assert_eq!((out.successes, out.v1_fail, out.mask_weight), (0, 500, 1));

    let empty = [0u8; 4];
    let st = unsafe { qds_monte_carlo(QdsAttack::NaiveFlip, 4, empty.as_ptr(), 10, 0, true, 1, &mut out) };
    assert_eq!(st, QdsStatus::InvalidArgument);
    let st = unsafe { qds_monte_carlo(QdsAttack::NaiveFlip, 4, ptr::null(), 0, 0, true, 1, &mut out) };
    assert_eq!(st, QdsStatus::InvalidArgument);
}

#[test]
fn status_messages_are_static_strings() {
    for st in [QdsStatus::Ok, QdsStatus::NullPointer, QdsStatus::WrongPhase, QdsStatus::Panic] {
        let msg = unsafe { CStr::from_ptr(qds_status_message(st)) }.to_str().unwrap();
        assert!(!msg.is_empty());
    }
    let v = unsafe { CStr::from_ptr(qds_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/qdsig.h")).unwrap()
}

#[test]
fn header_declares_every_export() {
    let h = header();
    for sym in [
        "qds_status_message",
        "qds_version",
        "qds_session_new",
        "qds_session_free",
        "qds_session_len",
        "qds_session_sign",
        "qds_session_signature",
        "qds_session_bob_signature",
        "qds_session_verify",
        "qds_oracle_honest",
        "qds_monte_carlo",
        "typedef struct QdsSession QdsSession;",
        "QDS_STATUS_WRONG_PHASE = 5",
        "QDS_ATTACK_MASQUERADE = 7",
    ] {
        assert!(h.contains(sym), "header lacks {sym}");
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"qdsig.h\"\n\
         int probe(void) {\n\
           QdsSession *s = NULL;\n\
           QdsVerdict v;\n\
           QdsTrialStats t;\n\
           uint8_t m[2] = {0, 1};\n\
           if (qds_session_new(2, 7, &s) != QDS_STATUS_OK) return 1;\n\
           qds_session_sign(s, m, 2);\n\
           qds_session_verify(s, true, &v);\n\
           qds_session_free(s);\n\
           qds_monte_carlo(QDS_ATTACK_MASQUERADE, 2, NULL, 10, 0, true, 1, &t);\n\
           return v.blamed == QDS_BLAME_NONE ? 0 : 2;\n\
         }\n",
    )
    .unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let out = Command::new("cc")
        .args(["-std=c11", "-Wall", "-Wextra", "-Werror", "-c"])
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg("-o")
        .arg(dir.path().join("use.o"))
        .output()
        .expect("C compiler");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

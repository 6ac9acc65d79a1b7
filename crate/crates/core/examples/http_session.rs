//! Drives the HTTP API in process: edits the shot, previews it and exports it.
//!
//! `cargo run --example http_session`. Use `chronolapse serve` for a real server.

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use tower::ServiceExt;

use chronolapse::interface::{default_space, load_params_file, router, Session};
use chronolapse::scene::load_scene_file;

async fn call(app: &axum::Router, req: Request<Body>) -> (StatusCode, axum::http::HeaderMap, Vec<u8>) {
    let res = app.clone().oneshot(req).await.unwrap();
    let (parts, body) = res.into_parts();
    (parts.status, parts.headers, body.collect().await.unwrap().to_bytes().to_vec())
}

#[tokio::main(flavor = "current_thread")]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let scene = load_scene_file(format!("{data}/scenes/tutorial.json"))?;
    let params = load_params_file(format!("{data}/params/tutorial.json"), &scene)?;
    let out = std::env::temp_dir().join("chronolapse-example");
    let app = router(Session::new(scene, params, default_space(), out).shared(), None);

    let (_, headers, body) = call(&app, Request::get("/api/params").body(Body::empty())?).await;
    let mut doc: serde_json::Value = serde_json::from_slice(&body)?;
    let revision = headers["x-revision"].to_str()?.to_owned();
    println!("revision {revision}, yaw {}", doc["viewfinder"]["yaw_deg"]);

    doc["viewfinder"]["yaw_deg"] = 225.0.into();
    doc["path"]["base"]["yaw_deg"] = 225.0.into();
    let put = Request::put("/api/params")
        .header("content-type", "application/json")
        .header("x-revision", revision)
        .body(Body::from(doc.to_string()))?;
    let (status, headers, _) = call(&app, put).await;
    println!("PUT {status}, revision {}", headers["x-revision"].to_str()?);

    for time in ["2024-06-21T18:30:00Z", "2024-06-21T20:15:00Z"] {
        let uri = format!("/api/preview?time={time}&w=160&h=90");
        let (status, headers, png) = call(&app, Request::get(uri).body(Body::empty())?).await;
        println!("preview {time}: {status}, {} bytes, mean {}", png.len(), headers["x-mean-luminance"].to_str()?);
    }

    let (_, _, body) = call(&app, Request::get("/api/export/robotplan?waypoints=3").body(Body::empty())?).await;
    println!("{}", String::from_utf8(body)?);
    Ok(())
}

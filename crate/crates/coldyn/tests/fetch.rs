mod common;

use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::thread;

use coldyn::fetch::{fetch_daily_history, parse_history, FetchError};
use coldyn::DateRange;
use common::date;

/// Serves `requests` HTTP responses from a fixed status and body; returns the URL template.
fn serve(
    status: u16,
    body: &'static str,
    requests: usize,
) -> (String, thread::JoinHandle<Vec<String>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let handle = thread::spawn(move || {
        let mut seen = Vec::new();
        for stream in listener.incoming().take(requests) {
            let mut stream = stream.unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request_line = String::new();
            reader.read_line(&mut request_line).unwrap();
            loop {
                let mut h = String::new();
                reader.read_line(&mut h).unwrap();
                if h == "\r\n" || h.is_empty() {
                    break;
                }
            }
            seen.push(request_line.trim().to_string());
            let reason = if status == 200 { "OK" } else { "Error" };
            write!(
                stream,
                "HTTP/1.1 {status} {reason}\r\nContent-Type: text/csv\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            )
            .unwrap();
        }
        seen
    });
    (
        format!("http://{addr}/history/{{ticker}}?start={{start}}&end={{end}}"),
        handle,
    )
}

const FIFTEEN_DAYS: &str = "date,close,market_cap\n\
2018-12-30,1,10\n2018-12-31,1,10\n2019-01-01,1,10\n2019-01-02,2,20\n2019-01-03,3,30\n2019-01-04,4,40\n\
2019-01-05,5,50\n2019-01-06,6,60\n2019-01-07,7,70\n2019-01-08,8,80\n2019-01-09,9,90\n2019-01-10,10,100\n\
2019-01-11,11,110\n2019-01-12,12,120\n2019-01-13,13,130\n";

fn ten_days() -> DateRange {
    DateRange::new(date("2019-01-01"), date("2019-01-10"))
}

#[test]
fn rows_are_restricted_to_the_range() {
    let (url, server) = serve(200, FIFTEEN_DAYS, 1);
    let text = fetch_daily_history(&url, "BTC", ten_days()).unwrap();
    let rows = parse_history("BTC", &text).unwrap();
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[0].date, date("2019-01-01"));
    assert_eq!(rows[9].close, Some(10.0));
    let requests = server.join().unwrap();
    assert_eq!(
        requests,
        ["GET /history/BTC?start=2019-01-01&end=2019-01-10 HTTP/1.1"]
    );
}

#[test]
fn http_failure_reports_status() {
    let (url, server) = serve(404, "not found", 1);
    let err = fetch_daily_history(&url, "BTC", ten_days()).unwrap_err();
    assert!(
        matches!(err, FetchError::Status { status: 404, .. }),
        "{err}"
    );
    server.join().unwrap();
}

#[test]
fn schema_mismatch_is_reported() {
    let (url, server) = serve(200, "day,price\n2019-01-01,1\n", 1);
    let err = fetch_daily_history(&url, "BTC", ten_days()).unwrap_err();
    assert!(matches!(err, FetchError::Schema { .. }), "{err}");
    server.join().unwrap();
}

#[test]
fn unreachable_endpoint_is_a_transport_error() {
    // Bind then drop to obtain a port nothing listens on.
    let port = TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port();
    let err = fetch_daily_history(
        &format!("http://127.0.0.1:{port}/{{ticker}}"),
        "BTC",
        ten_days(),
    )
    .unwrap_err();
    assert!(matches!(err, FetchError::Transport { .. }), "{err}");
}

#[test]
fn empty_ticker_is_rejected_before_any_request() {
    let err = fetch_daily_history("http://127.0.0.1:9/{ticker}", "  ", ten_days()).unwrap_err();
    assert!(matches!(err, FetchError::Input(_)));
}

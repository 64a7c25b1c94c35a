//! The default 52-asset universe.

pub const DEFAULT_UNIVERSE: [(&str, &str); 52] = [
    ("BTC", "Bitcoin"),
    ("ETH", "Ethereum"),
    ("BNB", "Binance Coin"),
    ("ADA", "Cardano"),
    ("XRP", "XRP"),
    ("DOGE", "Dogecoin"),
    ("BCH", "Bitcoin Cash"),
    ("LTC", "Litecoin"),
    ("LINK", "Chainlink"),
    ("ETC", "Ethereum Classic"),
    ("XLM", "Stellar"),
    ("THETA", "Theta"),
    ("VET", "VeChain"),
    ("FIL", "Filecoin"),
    ("TRX", "Tron"),
    ("SMR", "Monero"),
    ("EOS", "EOS"),
    ("CRO", "Crypto.com"),
    ("MKR", "Maker"),
    ("BSV", "Bitcoin SV"),
    ("NEO", "NEO"),
    ("XTZ", "Tezos"),
    ("MIOTA", "IOTA"),
    ("DCR", "Decred"),
    ("HT", "Huobi Token"),
    ("XEM", "NEM"),
    ("WAVES", "WAVES"),
    ("CEL", "Celsius"),
    ("DASH", "Dash"),
    ("ZEC", "Zcash"),
    ("MANA", "Decentraland"),
    ("ENJ", "Enjin Coin"),
    ("HOT", "Holo"),
    ("QNT", "Quant"),
    ("KCS", "KuCoin"),
    ("NEXO", "Nexo"),
    ("BAT", "Basic Attention Token"),
    ("ZIL", "Zilliqa"),
    ("BTG", "Bitcoin Gold"),
    ("BNT", "Bancor"),
    ("ONT", "Ontology"),
    ("ZEN", "Horizen"),
    ("SC", "Siacoin"),
    ("DGB", "Digibyte"),
    ("QTUM", "QTUM"),
    ("CHSB", "SwissBorg"),
    ("ZRX", "0x"),
    ("RVN", "Ravencoin"),
    ("OMG", "OMG Network"),
    ("NANO", "Nano"),
    ("ICX", "ICON"),
    ("FTM", "Fantom"),
];

/// Display name for a ticker, falling back to the ticker itself.
pub fn name_for(ticker: &str) -> &str {
    DEFAULT_UNIVERSE
        .iter()
        .find(|(t, _)| *t == ticker)
        .map(|(_, n)| *n)
        .unwrap_or(ticker)
}

pub fn default_tickers() -> Vec<String> {
    DEFAULT_UNIVERSE
        .iter()
        .map(|(t, _)| t.to_string())
        .collect()
}

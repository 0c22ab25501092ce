from pathlib import Path

from utils import ConfigError


def to_bool(val):
    return str(val).strip().lower() in ["1", "true", ".true.", "yes", "on"]


def _convert(raw: str):
    """'7' -> 7, '0.08' -> 0.08, '1 0.5 0.25' ou '1,0.5,0.25' -> lista, 'true' -> True."""
    text = raw.strip()
    if text.lower() in ("true", "false", ".true.", ".false.", "yes", "no", "on", "off"):
        return to_bool(text)
    parts = text.replace(",", " ").split()
    if not parts:
        return ""
    try:
        values = [int(p) if p.lstrip("+-").isdigit() else float(p) for p in parts]
    except ValueError:
        return text
    return values[0] if len(values) == 1 else values


def read_config(config_file: str) -> dict:
    """
    Lê um manifesto de experimento no formato chave = valor.
    Linhas vazias e comentários (#) são ignorados; '-' nas chaves vira '_'
    (extra-loss = 0.5 0.25 equivale a --extra-loss 0.5 0.25).
    """
    path = Path(config_file)
    if not path.exists():
        raise ConfigError(f"Arquivo de configuração não encontrado: {path}")

    config = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: esperado 'chave = valor', encontrado '{line}'")
            key, value = line.split("=", 1)
            key = key.strip().replace("-", "_")
            if not key:
                raise ConfigError(f"{path}:{lineno}: chave vazia")
            config[key] = _convert(value)

    return config


def merge_config(file_config: dict, flags: dict) -> dict:
    """Flags da linha de comando têm precedência sobre o arquivo (None = não informada)."""
    merged = dict(file_config)
    merged.update({k: v for k, v in flags.items() if v is not None})
    return merged

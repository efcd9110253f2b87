/**
 * Canonical JSON, byte-compatible with the session server.
 *
 * The server serializes every payload with sorted keys, no insignificant
 * whitespace and ASCII-only output (anything from U+007F up becomes a
 * lower-case \uXXXX escape, astral characters as surrogate pairs).  The
 * transcript download relies on byte equality, so this module reproduces
 * that format exactly rather than leaning on JSON.stringify alone.
 */

export type JsonValue =
  | null
  | boolean
  | number
  | string
  | JsonValue[]
  | { [key: string]: JsonValue };

const SHORT_ESCAPES: Record<string, string> = {
  '"': '\\"',
  "\\": "\\\\",
  "\b": "\\b",
  "\f": "\\f",
  "\n": "\\n",
  "\r": "\\r",
  "\t": "\\t",
};

function escapeString(s: string): string {
  let out = '"';
  for (let i = 0; i < s.length; i++) {
    const ch = s[i] as string;
    const code = s.charCodeAt(i);
    const short = SHORT_ESCAPES[ch];
    if (short !== undefined) {
      out += short;
    } else if (code < 0x20 || code >= 0x7f) {
      out += "\\u" + code.toString(16).padStart(4, "0");
    } else {
      out += ch;
    }
  }
  return out + '"';
}

export function canonicalJson(value: JsonValue): string {
  if (value === null) return "null";
  if (typeof value === "boolean") return value ? "true" : "false";
  if (typeof value === "number") {
    if (!Number.isFinite(value)) {
      throw new Error(`cannot serialize non-finite number ${value}`);
    }
    // the protocol only ever exchanges integers; floats would need the
    // server's repr rules and are rejected rather than silently mangled
    if (!Number.isInteger(value)) {
      throw new Error(`cannot serialize non-integer number ${value}`);
    }
    return String(value);
  }
  if (typeof value === "string") return escapeString(value);
  if (Array.isArray(value)) {
    return "[" + value.map(canonicalJson).join(",") + "]";
  }
  // keys sort by UTF-16 code unit, which matches the server's code-point
  // order for the ASCII keys this protocol uses
  const keys = Object.keys(value).sort();
  const parts = keys.map(
    (k) => escapeString(k) + ":" + canonicalJson(value[k] as JsonValue),
  );
  return "{" + parts.join(",") + "}";
}

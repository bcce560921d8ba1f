import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

export const HERE = dirname(fileURLToPath(import.meta.url));
export const FIXTURES = join(HERE, "..", "fixtures");
export const RESULTS = join(HERE, "..", "..", "results");

export function fixture(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf8");
}

/** All elements of `name` with the given class, as attribute maps. */
export function elements(
  svg: string,
  name: string,
  klass: string,
): Record<string, string>[] {
  const out: Record<string, string>[] = [];
  const tagRe = new RegExp(`<${name}\\s([^>]*?)/>`, "g");
  for (const match of svg.matchAll(tagRe)) {
    const attrs: Record<string, string> = {};
    for (const pair of match[1]!.matchAll(/([\w-]+)="([^"]*)"/g)) {
      attrs[pair[1]!] = pair[2]!;
    }
    if (attrs["class"] === klass) out.push(attrs);
  }
  return out;
}

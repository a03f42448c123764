// Word boundary rules mirror the service tokenizer: a word is a run of
// ASCII letters or digits, everything else terminates it.

const WORD_CHAR = /[0-9a-zA-Z]/;

export interface ContextUpdate {
  word: string;
  completed: boolean;
}

/** Token surrounding the cursor; empty string when the cursor sits between
 * two non-word characters. */
export function currentWord(text: string, cursor: number): string {
  let start = cursor;
  while (start > 0 && WORD_CHAR.test(text.charAt(start - 1))) {
    start -= 1;
  }
  let end = cursor;
  while (end < text.length && WORD_CHAR.test(text.charAt(end))) {
    end += 1;
  }
  return text.slice(start, end);
}

/** Word ending immediately before `pos`, or empty if none touches it. */
export function wordBefore(text: string, pos: number): string {
  let start = pos;
  while (start > 0 && WORD_CHAR.test(text.charAt(start - 1))) {
    start -= 1;
  }
  return text.slice(start, pos);
}

/** Last `limit` words up to the cursor, lowercased like the index side. */
export function windowWords(text: string, cursor: number, limit: number): string[] {
  const matches = text.slice(0, cursor).toLowerCase().match(/[0-9a-z]+/g) ?? [];
  return limit >= 0 ? matches.slice(Math.max(0, matches.length - limit)) : matches;
}

/**
 * Map one editing step to the update the service should see.
 *
 * `typed` is the inserted text when the step was a plain keypress, null for
 * deletions and other edits. A single non-word character completes the word
 * standing before it; anything else refreshes the partial word under the
 * cursor. Returns null when there is nothing worth sending (no word at the
 * cursor, or a terminator typed after another terminator).
 */
export function updateForInput(
  text: string,
  cursor: number,
  typed: string | null
): ContextUpdate | null {
  if (typed !== null && typed.length === 1 && !WORD_CHAR.test(typed)) {
    const word = wordBefore(text, cursor - 1);
    return word === "" ? null : { word, completed: true };
  }
  const word = currentWord(text, cursor);
  return word === "" ? null : { word, completed: false };
}

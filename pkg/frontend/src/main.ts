/** DOM wiring for the bracket console. The page is a single live view:
 * header (favorite, round, value), bracket columns, one card per open
 * game with winner radio buttons, and a submit button that stays
 * disabled until every game has a selection. */

import { AdvisorClient } from "./api.js";
import { columns } from "./bracket.js";
import { formatValue } from "./rational.js";
import { ConsoleSession } from "./session.js";

const serviceUrl =
  new URLSearchParams(window.location.search).get("service") ??
  "http://127.0.0.1:8000";

const session = new ConsoleSession(new AdvisorClient(serviceUrl));

const app = document.getElementById("app")!;

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function render(): void {
  app.replaceChildren();

  const picker = el("div", "picker");
  const input = document.createElement("input");
  input.type = "file";
  input.accept = ".json,application/json";
  input.addEventListener("change", async () => {
    const file = input.files?.[0];
    if (file) {
      await session.load(await file.text());
      render();
    }
  });
  picker.append(input);
  app.append(picker);

  if (session.error) {
    app.append(el("div", "error-panel", session.error));
  }
  const head = session.head;
  if (!head) {
    return;
  }

  const headerBox = el("div", "header");
  headerBox.append(el("span", "favorite", `favorite ${head.favorite}`));
  headerBox.append(el("span", "round", `round ${head.round}`));
  headerBox.append(el("span", "value", formatValue(head.value)));
  if (head.finished && head.winner) {
    headerBox.append(el("span", "winner", `tournament finished: ${head.winner}`));
  }
  app.append(headerBox);

  const bracket = el("div", "bracket");
  for (const column of columns(session.state!.tree)) {
    const col = el("div", "column");
    for (const label of column.labels) {
      col.append(el("div", "slot", label));
    }
    bracket.append(col);
  }
  app.append(bracket);

  if (head.finished) {
    return;
  }

  const games = el("div", "games");
  for (const card of session.cards) {
    const box = el("div", "game");
    for (const side of ["a", "b"] as const) {
      const name = card[side];
      const row = el("label", "participant");
      const radio = document.createElement("input");
      radio.type = "radio";
      radio.name = `game-${card.index}`;
      radio.checked = card.selected === name;
      radio.addEventListener("change", () => {
        session.select(card.index, name);
        render();
      });
      row.append(radio);
      row.append(el("span", "name", name));
      if (card[`${side}Coalition`]) {
        row.append(el("span", "badge coalition", "coalition"));
      }
      const badge = card[`${side}Badge`];
      if (badge) {
        row.append(el("span", `badge ${badge.toLowerCase()}`, badge));
      }
      box.append(row);
    }
    games.append(box);
  }
  app.append(games);

  const submit = document.createElement("button");
  submit.textContent = "submit outcomes";
  submit.disabled = !session.canSubmit;
  submit.addEventListener("click", async () => {
    await session.submit();
    render();
  });
  app.append(submit);
}

render();

// Word cloud under the map: a quick snapshot of trending terms for the
// current selection. Font size scales with weight; clicking a term feeds
// it back into the keyword filter, steering the next query.

import type { TermEntry } from "./types.js";

const MIN_PX = 12;
const MAX_PX = 34;

export class WordCloud {
    readonly root: HTMLElement;

    constructor(container: HTMLElement, private onTerm: (term: string) => void, private interactive = true) {
        this.root = document.createElement("div");
        this.root.className = "wordcloud hidden";
        this.root.dataset.testid = "wordcloud";
        container.appendChild(this.root);
    }

    render(terms: TermEntry[]): void {
        this.root.replaceChildren();
        if (terms.length === 0) {
            this.root.classList.add("hidden");
            return;
        }
        this.root.classList.remove("hidden");
        const max = terms[0].weight;
        const min = terms[terms.length - 1].weight;
        for (const { term, weight } of terms) {
            const span = document.createElement(this.interactive ? "button" : "span");
            span.className = "cloud-term";
            span.textContent = term;
            span.dataset.weight = String(weight);
            const scale = max === min ? 1.0 : (weight - min) / (max - min);
            span.style.fontSize = `${Math.round(MIN_PX + scale * (MAX_PX - MIN_PX))}px`;
            if (this.interactive) {
                span.addEventListener("click", () => this.onTerm(term));
            }
            this.root.appendChild(span);
        }
    }
}

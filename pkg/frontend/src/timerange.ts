// Dual-ended historical range control. The span grows as responses come
// in (earliest first_seen to latest last_seen observed), and the two
// sliders pick since/until inside it.

export interface RangeSelection {
    since: string | null;
    until: string | null;
}

export class TimeRange {
    readonly root: HTMLElement;
    private startInput: HTMLInputElement;
    private endInput: HTMLInputElement;
    private label: HTMLElement;
    private spanStart: number | null = null;
    private spanEnd: number | null = null;

    constructor(container: HTMLElement, private onChange: (range: RangeSelection) => void) {
        this.root = document.createElement("div");
        this.root.className = "time-range";
        this.root.dataset.testid = "time-range";

        const caption = document.createElement("div");
        caption.className = "control-caption";
        caption.textContent = "historical range";

        this.startInput = document.createElement("input");
        this.endInput = document.createElement("input");
        for (const input of [this.startInput, this.endInput]) {
            input.type = "range";
            input.min = "0";
            input.max = "1000";
            input.addEventListener("change", () => this.emit());
        }
        this.startInput.value = "0";
        this.endInput.value = "1000";
        this.startInput.dataset.testid = "range-start";
        this.endInput.dataset.testid = "range-end";

        this.label = document.createElement("div");
        this.label.className = "range-label";
        this.label.textContent = "full span";

        this.root.append(caption, this.startInput, this.endInput, this.label);
        container.appendChild(this.root);
    }

    // widen (never shrink) the known corpus span
    observe(firstSeen: string, lastSeen: string): void {
        const lo = Date.parse(firstSeen);
        const hi = Date.parse(lastSeen);
        if (Number.isNaN(lo) || Number.isNaN(hi)) return;
        if (this.spanStart === null || lo < this.spanStart) this.spanStart = lo;
        if (this.spanEnd === null || hi > this.spanEnd) this.spanEnd = hi;
    }

    private position(fraction: number): string {
        const start = this.spanStart ?? 0;
        const end = this.spanEnd ?? 0;
        const at = new Date(start + (end - start) * fraction);
        return at.toISOString().replace(".000Z", "Z");
    }

    private emit(): void {
        if (this.spanStart === null || this.spanEnd === null) return;
        let lo = Number(this.startInput.value);
        let hi = Number(this.endInput.value);
        if (lo > hi) [lo, hi] = [hi, lo];
        const selection: RangeSelection = {
            since: lo <= 0 ? null : this.position(lo / 1000),
            until: hi >= 1000 ? null : this.position(hi / 1000),
        };
        this.label.textContent =
            selection.since === null && selection.until === null
                ? "full span"
                : `${selection.since ?? "start"} → ${selection.until ?? "now"}`;
        this.onChange(selection);
    }
}

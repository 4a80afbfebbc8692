// Event dialog with three lazily loaded tabs: the unique-text content
// view, related events, and matched media. A vanished event (404) closes
// the dialog with a notice instead of leaving a husk open.

import { ApiClient, ApiError } from "./api.js";
import type { ContentEntry, EventDetail, MediaEntry, RelatedEvent } from "./types.js";

export type DialogTab = "content" | "related" | "media";

export class EventDialog {
    readonly root: HTMLElement;
    private title: HTMLElement;
    private body: HTMLElement;
    private tabBar: HTMLElement;
    private eventId: string | null = null;
    private loaded = new Map<DialogTab, boolean>();
    activeTab: DialogTab = "content";

    constructor(
        container: HTMLElement,
        private api: ApiClient,
        private onRelatedSelected: (id: string) => void,
        private onNotice: (message: string) => void,
    ) {
        this.root = document.createElement("div");
        this.root.className = "event-dialog hidden";
        this.root.dataset.testid = "event-dialog";

        const header = document.createElement("div");
        header.className = "dialog-header";
        this.title = document.createElement("h2");
        const close = document.createElement("button");
        close.className = "dialog-close";
        close.textContent = "×";
        close.addEventListener("click", () => this.close());
        header.append(this.title, close);

        this.tabBar = document.createElement("div");
        this.tabBar.className = "dialog-tabs";
        for (const tab of ["content", "related", "media"] as DialogTab[]) {
            const button = document.createElement("button");
            button.textContent = tab;
            button.dataset.dialogTab = tab;
            button.addEventListener("click", () => void this.showTab(tab));
            this.tabBar.appendChild(button);
        }

        this.body = document.createElement("div");
        this.body.className = "dialog-body";
        this.root.append(header, this.tabBar, this.body);
        container.appendChild(this.root);
    }

    get isOpen(): boolean {
        return !this.root.classList.contains("hidden");
    }

    async open(eventId: string): Promise<void> {
        this.eventId = eventId;
        this.loaded.clear();
        this.root.classList.remove("hidden");
        await this.showTab("content");
    }

    close(): void {
        this.root.classList.add("hidden");
        this.eventId = null;
    }

    async showTab(tab: DialogTab): Promise<void> {
        if (!this.eventId) return;
        this.activeTab = tab;
        for (const button of this.tabBar.querySelectorAll("button")) {
            button.classList.toggle("active", button.dataset.dialogTab === tab);
        }
        this.body.replaceChildren();
        try {
            if (tab === "content") {
                const detail = await this.api.eventDetail(this.eventId);
                this.title.textContent = detail.headline || detail.id;
                this.renderContent(detail);
            } else if (tab === "related") {
                this.renderRelated(await this.api.related(this.eventId));
            } else {
                this.renderMedia(await this.api.media(this.eventId));
            }
        } catch (error) {
            if (error instanceof ApiError && error.status === 404) {
                this.close();
                this.onNotice("event no longer exists");
                return;
            }
            throw error;
        }
    }

    private renderContent(detail: EventDetail): void {
        const sentiment = document.createElement("p");
        sentiment.className = "dialog-sentiment";
        const pol = detail.sentiment.mean_polarity.toFixed(2);
        const angry = Math.round(detail.sentiment.angry_fraction * 100);
        sentiment.textContent = `polarity ${pol} · ${angry}% angry${detail.sentiment.flagged_angry ? " · ⚠ flagged" : ""}`;
        this.body.appendChild(sentiment);
        for (const entry of detail.content) {
            this.body.appendChild(this.contentRow(entry));
        }
    }

    private contentRow(entry: ContentEntry): HTMLElement {
        const row = document.createElement("div");
        row.className = "content-row";
        const meta = document.createElement("div");
        meta.className = "content-meta";
        meta.textContent = `@${entry.author} · ${entry.created_at}` + (entry.occurrences > 1 ? ` · ×${entry.occurrences}` : "");
        const text = document.createElement("div");
        text.textContent = entry.text;
        row.append(meta, text);
        return row;
    }

    private renderRelated(related: RelatedEvent[]): void {
        if (related.length === 0) {
            const empty = document.createElement("p");
            empty.className = "placeholder";
            empty.textContent = "no related events";
            this.body.appendChild(empty);
            return;
        }
        for (const event of related) {
            const row = document.createElement("div");
            row.className = "related-row";
            row.dataset.eventId = event.id;
            const headline = document.createElement("div");
            headline.textContent = event.headline || event.id;
            const meta = document.createElement("div");
            meta.className = "content-meta";
            meta.textContent = `${event.category} · score ${event.score.toFixed(2)} · ${event.post_count} posts`;
            row.append(headline, meta);
            row.addEventListener("click", () => this.onRelatedSelected(event.id));
            this.body.appendChild(row);
        }
    }

    private renderMedia(media: MediaEntry[]): void {
        if (media.length === 0) {
            const empty = document.createElement("p");
            empty.className = "placeholder";
            empty.textContent = "none found";
            this.body.appendChild(empty);
            return;
        }
        const grid = document.createElement("div");
        grid.className = "media-grid";
        for (const item of media) {
            const cell = document.createElement("figure");
            const img = document.createElement("img");
            img.src = item.url;
            img.loading = "lazy";
            img.alt = `media ${item.id}`;
            const caption = document.createElement("figcaption");
            caption.textContent = `${item.origin} · ${item.score.toFixed(2)}`;
            cell.append(img, caption);
            grid.appendChild(cell);
        }
        this.body.appendChild(grid);
    }
}

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

/* A fixed-size ring buffer. grow(r) is mentioned here but never called. */
struct ring {
    int *slots;
    size_t head, tail, cap;
};

static size_t wrap(const struct ring *r, size_t i)
{
    return i % r->cap;
}

struct ring *ring_new(size_t cap)
{
    struct ring *r = malloc(sizeof(struct ring));
    if (r == NULL)
        return NULL;
    r->slots = calloc(cap, sizeof(int));
    r->head = r->tail = 0;
    r->cap = cap;
    return r;
}

int ring_push(struct ring *r, int v)
{
    if (wrap(r, r->tail + 1) == r->head) {
        fprintf(stderr, "ring full: push(%d)\n", v);
        return -1;
    }
    r->slots[r->tail] = v;
    r->tail = wrap(r, r->tail + 1);
    return 0;
}

int ring_pop(struct ring *r, int *out)
{
    if (r->head == r->tail)
        return -1;
    *out = r->slots[r->head];
    r->head = wrap(r, r->head + 1);
    return 0;
}

void ring_free(struct ring *r)
{
    memset(r->slots, 0, r->cap * sizeof(int));
    free(r->slots);
    free(r);
}

int main(void)
{
    struct ring *r = ring_new(8);
    int v;
    for (int i = 0; i < 3; i++)
        ring_push(r, i);
    while (ring_pop(r, &v) == 0)
        printf("%d\n", v);
    ring_free(r);
    return 0;
}

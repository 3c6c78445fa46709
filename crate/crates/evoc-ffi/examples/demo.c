#include "evoc.h"
#include <stdio.h>
#include <assert.h>

int main(void) {
    printf("evoc %s\n", evoc_version());

    EvocParams *params = NULL;
    EvocStatus status = evoc_params_from_json(
        "{\"grid_width\": 8, \"grid_height\": 8, \"iterations\": 20, \"seed\": 3}", &params);
    assert(status == EVOC_STATUS_OK);

    EvocSeries *series = NULL;
    status = evoc_run(params, &series);
    assert(status == EVOC_STATUS_OK);
    evoc_params_free(params);

    size_t records = evoc_series_record_count(series);
    double first = 0.0, last = 0.0;
    assert(evoc_series_mean_fitness(series, 0, &first) == EVOC_STATUS_OK);
    assert(evoc_series_mean_fitness(series, records - 1, &last) == EVOC_STATUS_OK);
    printf("records=%zu agents=%zu mean fitness %.2f -> %.2f\n",
           records, evoc_series_agent_count(series), first, last);
    assert(last >= first);

    double max = 0.0; size_t count = 0;
    assert(evoc_oracle(EVOC_HEAD_RULE_PROSE, &max, &count) == EVOC_STATUS_OK);
    printf("oracle: max %.1f with %zu optima\n", max, count);
    assert(max == 10.0 && count == 8);

    evoc_series_free(series);
    puts("C ABI smoke test passed");
    return 0;
}
